#pragma once

#include "mosum/model.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace mosum {

/// Gamma inter-event distribution given by mean and standard deviation;
/// shape = (mu/sigma)^2, rate = mu/sigma^2. sigma == mu is the exponential
/// case.
struct InterEventParams {
    double mu = 1.0;
    double sigma = 1.0;

    double shape() const { return (mu / sigma) * (mu / sigma); }
    double rate() const { return mu / (sigma * sigma); }
};

struct Dependence {
    enum class Kind { Independent, SharedComponent };
    Kind kind = Kind::Independent;
    double corr = 0.2; // pairwise correlation for SharedComponent
};

/// Regime-switching renewal scenario: per segment, per component inter-event
/// parameters. Segment j covers (c_j, c_{j+1}].
struct RenewalScenario {
    std::string name;
    double horizon = 0.0;
    int dim = 1;
    std::vector<double> change_points;
    std::vector<std::vector<InterEventParams>> segments; // [segment][component]
    Dependence dependence;

    void validate() const;
    /// Oracle ChangeSpec: drift 1/mu per component, covariance from the
    /// renewal asymptotics (full matrix in the dependent case).
    ChangeSpec to_change_spec() const;
};

/// Named presets. "constvar-independent", "smallvar-dependent",
/// "poisson-dependent", ... encode the three-dimensional design with
/// T = 1600, changes {250, 500, 900, 1150} and mu = 1.3, 0.9, 0.6, 0.8, 1.3;
/// "univariate-demo" and "multiscale" back the figure exports.
RenewalScenario scenario_preset(const std::string& name);
std::vector<std::string> scenario_preset_names();

/// Segment-wise renewal simulation: the inter-event clock restarts at every
/// change point; events beyond the horizon are discarded. The dependent mode
/// draws Y_j = X_j + X_shared with gamma components chosen so each Y_j has
/// the segment's mu/sigma and all pairs have the target correlation.
EventSeries simulate_renewal_regimes(const RenewalScenario& scenario, std::uint64_t seed);

enum class InnovationKind { Gaussian, StudentT };

struct Innovation {
    InnovationKind kind = InnovationKind::Gaussian;
    double df = 5.0; // StudentT only; scaled to unit variance, needs df > 2
};

/// Unit-step partial-sum path: increment k is drift + Sigma^{1/2} X_k with
/// i.i.d. standardized innovations, regimes switching per the spec.
SampledPath simulate_partial_sum_regimes(const ChangeSpec& spec, const Innovation& innovation,
                                         std::uint64_t seed);

/// Wiener path with piecewise drift: increments N(drift * dt, Sigma * dt).
SampledPath simulate_wiener_drift(const ChangeSpec& spec, double grid_step, std::uint64_t seed);

/// Exact integrated drift of the spec on the grid (no stochastic term).
SampledPath noiseless_path(const ChangeSpec& spec, double grid_step);

} // namespace mosum
