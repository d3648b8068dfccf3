#pragma once

#include "mosum/model.hpp"

#include <memory>
#include <optional>

namespace mosum {

/// Supplies the scale matrix A_t used in the significance rule. Matrices are
/// symmetric positive definite after flooring; queries are pure.
class ScaleProvider {
public:
    virtual ~ScaleProvider() = default;

    virtual int dim() const = 0;
    virtual bool diagonal() const = 0;
    /// Only valid when diagonal() is true.
    virtual Vector diagonal_at(double t) const;
    virtual Matrix matrix_at(double t) const = 0;
    virtual ScaleMode mode() const = 0;
    /// "estimated" or "oracle".
    virtual std::string provenance() const = 0;
};

/// Result of the local renewal variance estimate at one grid point.
struct LocalVarianceEstimate {
    double value = 0.0;
    bool left_usable = false;   // >= 2 complete inter-event times in (t-h, t]
    bool right_usable = false;  // >= 2 complete inter-event times in (t, t+h]
    bool used_global_fallback = false;
};

/// Sample variance over mean cubed, min over the two one-sided windows.
/// Only inter-event intervals fully contained in (t-h, t] resp. (t, t+h]
/// enter the sample moments; the variance is the unbiased (n-1) one. Windows
/// with fewer than two usable intervals fall back to the other side, then to
/// the whole-sample estimate. The result is floored at `floor`.
LocalVarianceEstimate local_renewal_variance(const std::vector<double>& events, double t,
                                             double bandwidth, double floor);

/// Asymptotic covariance of a renewal-driven counting vector.
/// Independent inter-event times: B diag(sigma2_j / mu_j^3) B'.
/// Dependent inter-event times (sigma_iet given): sigma_iet / mu_1^3, which
/// requires equal means across components.
Matrix renewal_asymptotic_covariance(const Vector& mu, const Vector& sigma2,
                                     const std::optional<Matrix>& combination = std::nullopt,
                                     const std::optional<Matrix>& sigma_iet = std::nullopt);

/// Mode A needs the raw events; TRUE_* modes need the oracle ChangeSpec.
std::unique_ptr<ScaleProvider> build_scale_provider(ScaleMode mode,
                                                    const EventSeries* events,
                                                    const ChangeSpec* spec,
                                                    const SegmentationConfig& config,
                                                    double horizon, int dim);

} // namespace mosum
