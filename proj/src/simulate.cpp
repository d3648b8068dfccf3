#include "mosum/simulate.hpp"

#include "mosum/scale.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <random>
#include <sstream>

namespace mosum {

void RenewalScenario::validate() const {
    if (!(horizon > 0.0))
        throw validation_error("scenario horizon must be positive");
    if (dim < 1)
        throw validation_error("scenario needs at least one component");
    if (segments.size() != change_points.size() + 1)
        throw validation_error("scenario needs one parameter set per segment");
    double prev = 0.0;
    for (double c : change_points) {
        if (!(c > prev) || !(c < horizon))
            throw validation_error("scenario change points must be increasing inside (0, T)");
        prev = c;
    }
    for (const auto& seg : segments) {
        if (seg.size() != static_cast<std::size_t>(dim))
            throw validation_error("segment parameter count must match the dimension");
        for (const auto& par : seg) {
            if (!(par.mu > 0.0) || !(par.sigma > 0.0))
                throw validation_error("inter-event mu and sigma must be positive");
            if (!std::isfinite(par.shape()) || !std::isfinite(par.rate()))
                throw validation_error("inter-event parameters give a degenerate gamma law");
        }
    }
    if (dependence.kind == Dependence::Kind::SharedComponent) {
        if (!(dependence.corr > 0.0 && dependence.corr < 1.0))
            throw validation_error("shared-component correlation must lie in (0, 1)");
        for (const auto& seg : segments)
            for (const auto& par : seg)
                if (std::abs(par.mu - seg.front().mu) > 1e-12 ||
                    std::abs(par.sigma - seg.front().sigma) > 1e-12)
                    throw validation_error("the shared-component construction needs equal "
                                           "inter-event parameters across components");
    }
}

ChangeSpec RenewalScenario::to_change_spec() const {
    validate();
    std::vector<int> labels(segments.size());
    std::vector<Vector> drifts(segments.size());
    std::vector<Matrix> covs(segments.size());
    for (std::size_t s = 0; s < segments.size(); ++s) {
        labels[s] = static_cast<int>(s) + 1;
        Vector mu(dim), sigma2(dim);
        Vector drift(dim);
        for (int j = 0; j < dim; ++j) {
            const auto& par = segments[s][static_cast<std::size_t>(j)];
            mu[j] = par.mu;
            sigma2[j] = par.sigma * par.sigma;
            drift[j] = 1.0 / par.mu;
        }
        drifts[s] = drift;
        if (dependence.kind == Dependence::Kind::SharedComponent) {
            const double rho = dependence.corr;
            const double s2 = sigma2[0];
            Matrix sigma_iet = Matrix::Constant(dim, dim, rho * s2);
            sigma_iet.diagonal().setConstant(s2);
            covs[s] = renewal_asymptotic_covariance(mu, sigma2, std::nullopt, sigma_iet);
        } else {
            covs[s] = renewal_asymptotic_covariance(mu, sigma2);
        }
    }
    return ChangeSpec(horizon, change_points, std::move(labels), std::move(drifts),
                      std::move(covs));
}

namespace {

RenewalScenario base_study_scenario(const std::string& name, int dim, bool dependent,
                                    const std::function<double(double)>& sigma_of_mu) {
    RenewalScenario scenario;
    scenario.name = name;
    scenario.horizon = 1600.0;
    scenario.dim = dim;
    scenario.change_points = {250.0, 500.0, 900.0, 1150.0};
    const std::vector<double> mus = {1.3, 0.9, 0.6, 0.8, 1.3};
    for (double mu : mus)
        scenario.segments.push_back(
            std::vector<InterEventParams>(static_cast<std::size_t>(dim), {mu, sigma_of_mu(mu)}));
    scenario.dependence.kind =
        dependent ? Dependence::Kind::SharedComponent : Dependence::Kind::Independent;
    scenario.dependence.corr = 0.2;
    return scenario;
}

RenewalScenario from_mu_table(const std::string& name, double horizon, int dim,
                              std::vector<double> changes, const std::vector<double>& mus,
                              const std::function<double(double)>& sigma_of_mu) {
    RenewalScenario scenario;
    scenario.name = name;
    scenario.horizon = horizon;
    scenario.dim = dim;
    scenario.change_points = std::move(changes);
    for (double mu : mus)
        scenario.segments.push_back(
            std::vector<InterEventParams>(static_cast<std::size_t>(dim), {mu, sigma_of_mu(mu)}));
    return scenario;
}

} // namespace

RenewalScenario scenario_preset(const std::string& name) {
    const auto constvar = [](double) { return 0.7; };
    const auto smallvar = [](double mu) { return 5.0 / 6.0 * mu; };
    const auto poisson = [](double mu) { return mu; };

    if (name == "constvar-independent")
        return base_study_scenario(name, 3, false, constvar);
    if (name == "constvar-dependent")
        return base_study_scenario(name, 3, true, constvar);
    if (name == "smallvar-independent")
        return base_study_scenario(name, 3, false, smallvar);
    if (name == "smallvar-dependent")
        return base_study_scenario(name, 3, true, smallvar);
    if (name == "poisson-independent")
        return base_study_scenario(name, 3, false, poisson);
    if (name == "poisson-dependent")
        return base_study_scenario(name, 3, true, poisson);
    if (name == "univariate-demo") {
        // One renewal component with three changes; pairs with h = 70
        // (bandwidth ratio 0.07).
        return from_mu_table(name, 1000.0, 1, {300.0, 550.0, 800.0}, {1.0, 0.65, 1.0, 0.7},
                             poisson);
    }
    if (name == "multiscale") {
        // A tight opposite-sign intensity spike (200, 220), mid-scale
        // changes, and a small isolated late change. The spike cancels
        // inside bandwidths of 90+ while the late change needs the largest
        // one, so no single bandwidth in {30,60,90,120} sees every change.
        return from_mu_table(name, 1600.0, 3, {200.0, 220.0, 500.0, 800.0, 1250.0},
                             {1.0, 1.0 / 2.2, 1.0, 1.0 / 1.6, 1.0 / 1.14, 1.0 / 1.465},
                             smallvar);
    }
    throw validation_error("unknown scenario preset '" + name + "'");
}

std::vector<std::string> scenario_preset_names() {
    return {"constvar-independent", "constvar-dependent", "smallvar-independent",
            "smallvar-dependent",   "poisson-independent", "poisson-dependent",
            "univariate-demo",      "multiscale"};
}

namespace {

// Gamma draw by shape/rate; std::gamma_distribution is exact for all shapes.
double gamma_draw(std::mt19937_64& rng, double shape, double rate) {
    std::gamma_distribution<double> dist(shape, 1.0 / rate);
    return dist(rng);
}

void simulate_independent_segment(std::mt19937_64& rng, const std::vector<InterEventParams>& pars,
                                  double start, double end, double horizon,
                                  std::vector<std::vector<double>>& components) {
    for (std::size_t j = 0; j < pars.size(); ++j) {
        const double shape = pars[j].shape();
        const double rate = pars[j].rate();
        double clock = start;
        while (true) {
            clock += gamma_draw(rng, shape, rate);
            if (clock > end || clock > horizon)
                break;
            components[j].push_back(clock);
        }
    }
}

// Y_j = X_j + X_shared with X_j ~ Gamma((1-rho) s, rate), X_shared ~
// Gamma(rho s, rate) and s = (mu/sigma)^2, so each Y_j has the target
// mu/sigma and every pair correlates at rho.
void simulate_dependent_segment(std::mt19937_64& rng, const std::vector<InterEventParams>& pars,
                                double rho, double start, double end, double horizon,
                                std::vector<std::vector<double>>& components) {
    const double total_shape = pars.front().shape();
    const double rate = pars.front().rate();
    const double own_shape = (1.0 - rho) * total_shape;
    const double shared_shape = rho * total_shape;
    const std::size_t p = pars.size();

    std::vector<double> clocks(p, start);
    const double stop = std::min(end, horizon);
    while (true) {
        bool any_active = false;
        for (double c : clocks)
            any_active = any_active || c <= stop;
        if (!any_active)
            break;
        const double shared = gamma_draw(rng, shared_shape, rate);
        for (std::size_t j = 0; j < p; ++j) {
            const double draw = gamma_draw(rng, own_shape, rate) + shared;
            if (clocks[j] > stop)
                continue; // component already past the segment; keep the
                          // draw count aligned across components
            clocks[j] += draw;
            if (clocks[j] <= stop)
                components[j].push_back(clocks[j]);
        }
    }
}

} // namespace

EventSeries simulate_renewal_regimes(const RenewalScenario& scenario, std::uint64_t seed) {
    scenario.validate();
    std::mt19937_64 rng(splitmix64(seed));
    std::vector<std::vector<double>> components(static_cast<std::size_t>(scenario.dim));

    std::vector<double> bounds = scenario.change_points;
    bounds.push_back(scenario.horizon);
    double start = 0.0;
    for (std::size_t s = 0; s < scenario.segments.size(); ++s) {
        const double end = bounds[s];
        if (scenario.dependence.kind == Dependence::Kind::SharedComponent)
            simulate_dependent_segment(rng, scenario.segments[s], scenario.dependence.corr,
                                       start, end, scenario.horizon, components);
        else
            simulate_independent_segment(rng, scenario.segments[s], start, end,
                                         scenario.horizon, components);
        start = end;
    }
    return EventSeries(std::move(components), scenario.horizon);
}

namespace {

Matrix cholesky_factor(const Matrix& sigma, const char* what) {
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw numeric_error(std::string(what) + ": covariance is not positive definite");
    return llt.matrixL();
}

} // namespace

SampledPath simulate_partial_sum_regimes(const ChangeSpec& spec, const Innovation& innovation,
                                         std::uint64_t seed) {
    spec.validate();
    if (innovation.kind == InnovationKind::StudentT && !(innovation.df > 2.0))
        throw validation_error("student-t innovations need df > 2");

    std::vector<Matrix> roots;
    roots.reserve(spec.covariances.size());
    for (const auto& sigma : spec.covariances)
        roots.push_back(cholesky_factor(sigma, "partial-sum simulation"));

    const Eigen::Index n = grid_steps(spec.horizon, 1.0, "horizon") + 1;
    const int p = spec.dim();
    SampledPath path;
    path.grid_step = 1.0;
    path.horizon = spec.horizon;
    path.values.setZero(p, n);

    std::mt19937_64 rng(splitmix64(seed));
    std::normal_distribution<double> normal;
    std::student_t_distribution<double> student(innovation.kind == InnovationKind::StudentT
                                                    ? innovation.df
                                                    : 3.0);
    const double t_scale = innovation.kind == InnovationKind::StudentT
                               ? std::sqrt((innovation.df - 2.0) / innovation.df)
                               : 1.0;

    Vector x(p);
    for (Eigen::Index k = 1; k < n; ++k) {
        const double t = static_cast<double>(k);
        const auto seg = spec.segment_index(t);
        const auto label = static_cast<std::size_t>(spec.regime_labels[seg] - 1);
        for (int i = 0; i < p; ++i)
            x[i] = innovation.kind == InnovationKind::StudentT ? t_scale * student(rng)
                                                               : normal(rng);
        path.values.col(k) =
            path.values.col(k - 1) + spec.drift_of_segment(seg) + roots[label] * x;
    }
    return path;
}

SampledPath simulate_wiener_drift(const ChangeSpec& spec, double grid_step, std::uint64_t seed) {
    spec.validate();
    std::vector<Matrix> roots;
    roots.reserve(spec.covariances.size());
    for (const auto& sigma : spec.covariances)
        roots.push_back(cholesky_factor(sigma, "wiener simulation"));

    const Eigen::Index n = grid_steps(spec.horizon, grid_step, "horizon") + 1;
    const int p = spec.dim();
    SampledPath path;
    path.grid_step = grid_step;
    path.horizon = spec.horizon;
    path.values.setZero(p, n);

    std::mt19937_64 rng(splitmix64(seed));
    std::normal_distribution<double> normal;
    const double sqrt_dt = std::sqrt(grid_step);

    Vector x(p);
    for (Eigen::Index k = 1; k < n; ++k) {
        const double t = static_cast<double>(k) * grid_step;
        const auto seg = spec.segment_index(t);
        const auto label = static_cast<std::size_t>(spec.regime_labels[seg] - 1);
        for (int i = 0; i < p; ++i)
            x[i] = normal(rng);
        path.values.col(k) = path.values.col(k - 1) + grid_step * spec.drift_of_segment(seg) +
                             sqrt_dt * (roots[label] * x);
    }
    return path;
}

SampledPath noiseless_path(const ChangeSpec& spec, double grid_step) {
    spec.validate();
    const Eigen::Index n = grid_steps(spec.horizon, grid_step, "horizon") + 1;
    const int p = spec.dim();
    SampledPath path;
    path.grid_step = grid_step;
    path.horizon = spec.horizon;
    path.values.setZero(p, n);

    // Integrated drift accumulated across segment boundaries so each grid
    // value is exact up to rounding.
    std::vector<double> bounds = spec.change_points;
    bounds.push_back(spec.horizon);
    Vector base = Vector::Zero(p);
    std::size_t seg = 0;
    double seg_start = 0.0;
    for (Eigen::Index k = 1; k < n; ++k) {
        const double t = static_cast<double>(k) * grid_step;
        while (seg < spec.change_points.size() && t > bounds[seg]) {
            base += (bounds[seg] - seg_start) * spec.drift_of_segment(seg);
            seg_start = bounds[seg];
            ++seg;
        }
        path.values.col(k) = base + (t - seg_start) * spec.drift_of_segment(seg);
    }
    return path;
}

} // namespace mosum
