#pragma once

#include "mosum/model.hpp"
#include "mosum/mosum.hpp"
#include "mosum/scale.hpp"
#include "mosum/threshold.hpp"

#include <array>
#include <optional>

namespace mosum {

struct EstimateRecord {
    double time = 0.0;
    double peak_norm = 0.0;
    double peak_quadform = 0.0;
    double window_lo = 0.0; // eta-window actually used, clipped to [h, T-h]
    double window_hi = 0.0;
    Vector d_hat;           // windowed increment-mean difference at the estimate
    double sigma2_pre = 0.0;  // u' A_{c-h} u with u = d_hat / |d_hat|
    double sigma2_post = 0.0; // u' A_{c+h} u
};

struct SegmentationResult {
    double horizon = 0.0;
    int dim = 0;
    SegmentationConfig config;
    ThresholdResult threshold;
    double beta_used = 0.0;
    std::vector<std::string> warnings;
    std::vector<EstimateRecord> estimates; // strictly increasing in time

    std::size_t q_hat() const { return estimates.size(); }
    std::vector<double> estimate_times() const;
};

/// Significant local extrema per the eta-criterion: t* is reported when it is
/// the smallest maximizer of |M_t| over [t*-eta h, t*+eta h] (intersected
/// with [h, T-h]) and quadform[t*] >= beta.
SegmentationResult significant_local_extrema(const MosumSeries& series, double beta,
                                             double eta, double bandwidth);

/// Full pipeline: path (from events if needed) -> scale provider -> MOSUM ->
/// threshold -> eta-criterion. `spec` supplies the oracle covariances for the
/// TRUE_* scale modes.
SegmentationResult segment(const EventSeries& events, const ChangeSpec* spec,
                           const SegmentationConfig& config);
SegmentationResult segment(const SampledPath& path, const EventSeries* events,
                           const ChangeSpec* spec, const SegmentationConfig& config);

/// Quantiles of argmax{ -|t| + sigma_side B_t } with independent sides,
///   left variance  sigma1^2 + 4 sigma21^2 + sigma3^2,
///   right variance sigma1^2 + 4 sigma22^2 + sigma3^2,
/// the limit law of |d|^2 (c_hat - c) for local changes.
struct LimitLawQuantiles {
    std::array<double, 4> sigma{}; // sigma_(1), sigma_(21), sigma_(22), sigma_(3)
    double sigma_left = 0.0;       // sqrt of the left-side variance
    double sigma_right = 0.0;
    int n_mc = 0;
    std::uint64_t seed = 0;
    double horizon = 0.0; // D
    double step = 0.0;
    std::vector<double> sample; // sorted argmax draws

    double quantile(double level) const { return sorted_quantile(sample, level); }
};

/// Simulates the two-sided drifted process on [-D, D]. Errors out when the
/// argmax lands on the boundary in >= 1% of replicates.
LimitLawQuantiles simulate_argmax_limit(const std::array<double, 4>& sigma_params, int n_mc,
                                        double horizon_D, double step, std::uint64_t seed,
                                        unsigned threads = default_threads());

/// Variances of the two sides of the limit process for a change with
/// pre/post-regime covariances projected on u = d / |d|:
/// sigma_(1) = sigma_(21) = sqrt(u' Sigma_pre u), sigma_(22) = sigma_(3) =
/// sqrt(u' Sigma_post u).
std::array<double, 4> limit_sigma_params(double sigma2_pre, double sigma2_post);

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double alpha = 0.0;
};

/// [c_hat + q_{alpha/2} / |d_hat|^2, c_hat + q_{1-alpha/2} / |d_hat|^2],
/// clipped to [0, T].
ConfidenceInterval confidence_interval(double estimate, const Vector& d_hat,
                                       const LimitLawQuantiles& quantiles, double alpha,
                                       double horizon);

} // namespace mosum
