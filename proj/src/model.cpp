#include "mosum/model.hpp"

#include <cmath>
#include <sstream>

namespace mosum {

namespace {

double relative_tolerance(double scale) {
    return 1e-9 * std::max(1.0, std::abs(scale));
}

} // namespace

EventSeries::EventSeries(std::vector<std::vector<double>> comps, double T)
    : components(std::move(comps)), horizon(T) {
    validate();
}

EventSeries EventSeries::from_unsorted(std::vector<std::vector<double>> comps, double T) {
    for (auto& c : comps)
        std::sort(c.begin(), c.end());
    return EventSeries(std::move(comps), T);
}

void EventSeries::validate() const {
    if (!(horizon > 0.0))
        throw validation_error("event series horizon must be positive");
    if (components.empty())
        throw validation_error("event series needs at least one component");
    for (std::size_t j = 0; j < components.size(); ++j) {
        const auto& c = components[j];
        double prev = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (!(c[k] > 0.0) || c[k] > horizon) {
                std::ostringstream msg;
                msg << "component " << j + 1 << ": event time " << c[k]
                    << " outside (0, " << horizon << "]";
                throw validation_error(msg.str());
            }
            if (k > 0 && !(c[k] > prev)) {
                std::ostringstream msg;
                msg << "component " << j + 1 << ": event times not strictly increasing at index "
                    << k;
                throw validation_error(msg.str());
            }
            prev = c[k];
        }
    }
}

ChangeSpec::ChangeSpec(double T, std::vector<double> changes, std::vector<int> labels,
                       std::vector<Vector> mu, std::vector<Matrix> sigma)
    : horizon(T), change_points(std::move(changes)), regime_labels(std::move(labels)),
      drifts(std::move(mu)), covariances(std::move(sigma)) {
    validate();
}

void ChangeSpec::validate() const {
    if (!(horizon > 0.0))
        throw validation_error("change spec horizon must be positive");
    if (regime_labels.size() != change_points.size() + 1)
        throw validation_error("change spec needs exactly one regime label per segment");
    if (drifts.empty() || drifts.size() != covariances.size())
        throw validation_error("change spec needs matching drift/covariance lists");
    const auto p = drifts.front().size();
    for (const auto& d : drifts)
        if (d.size() != p)
            throw validation_error("all regime drifts must share the dimension");
    for (const auto& s : covariances) {
        if (s.rows() != p || s.cols() != p)
            throw validation_error("regime covariances must be p x p");
        if (!s.isApprox(s.transpose(), 1e-12))
            throw validation_error("regime covariance is not symmetric");
    }
    double prev = 0.0;
    for (double c : change_points) {
        if (!(c > prev) || !(c < horizon))
            throw validation_error("change points must be strictly increasing inside (0, T)");
        prev = c;
    }
    const int P = static_cast<int>(drifts.size());
    for (int label : regime_labels)
        if (label < 1 || label > P)
            throw validation_error("regime label outside {1..P}");
    for (std::size_t i = 0; i < change_points.size(); ++i) {
        if (drift_change(i).norm() == 0.0) {
            std::ostringstream msg;
            msg << "change point " << change_points[i] << " has no drift change";
            throw validation_error(msg.str());
        }
    }
}

std::size_t ChangeSpec::segment_index(double t) const {
    const auto it = std::lower_bound(change_points.begin(), change_points.end(), t);
    return static_cast<std::size_t>(it - change_points.begin());
}

const Vector& ChangeSpec::drift_of_segment(std::size_t seg) const {
    return drifts[static_cast<std::size_t>(regime_labels.at(seg) - 1)];
}

const Matrix& ChangeSpec::covariance_of_segment(std::size_t seg) const {
    return covariances[static_cast<std::size_t>(regime_labels.at(seg) - 1)];
}

Vector ChangeSpec::drift_change(std::size_t i) const {
    return drift_of_segment(i + 1) - drift_of_segment(i);
}

std::string to_string(ScaleMode mode) {
    switch (mode) {
    case ScaleMode::LocalDiagonalEstimate: return "local_diag";
    case ScaleMode::TrueDiagonal: return "true_diag";
    case ScaleMode::TrueFull: return "true_full";
    case ScaleMode::Identity: return "identity";
    }
    throw validation_error("unknown scale mode");
}

ScaleMode scale_mode_from_string(const std::string& name) {
    if (name == "local_diag") return ScaleMode::LocalDiagonalEstimate;
    if (name == "true_diag") return ScaleMode::TrueDiagonal;
    if (name == "true_full") return ScaleMode::TrueFull;
    if (name == "identity") return ScaleMode::Identity;
    throw validation_error("unknown scale mode '" + name +
                           "' (expected local_diag | true_diag | true_full | identity)");
}

ValidationReport validate_config(const SegmentationConfig& config, double horizon, int dim) {
    ValidationReport report;
    auto error = [&](const std::string& msg) { report.errors.push_back(msg); };
    auto warn = [&](const std::string& msg) { report.warnings.push_back(msg); };

    if (!(horizon > 0.0))
        error("horizon must be positive");
    if (dim < 1)
        error("dimension must be at least 1");
    if (!(config.grid_step > 0.0))
        error("grid_step must be positive");
    if (!(config.bandwidth_h > 0.0))
        error("bandwidth_h must be positive");
    if (!(config.eta > 0.0 && config.eta < 1.0))
        error("eta must lie in (0, 1)");
    if (!(config.alpha > 0.0 && config.alpha < 1.0))
        error("alpha must lie in (0, 1)");
    if (!(config.variance_floor > 0.0))
        error("variance_floor must be positive");
    if (report.errors.empty()) {
        if (2.0 * config.bandwidth_h >= horizon)
            error("bandwidth violates 2h < T");
        if (config.bandwidth_h < 2.0 * config.grid_step)
            error("bandwidth must cover at least two grid steps");
        if (config.eta * config.bandwidth_h < config.grid_step)
            error("eta * h must be at least one grid step");
        const double steps = config.bandwidth_h / config.grid_step;
        if (std::abs(steps - std::round(steps)) > relative_tolerance(steps))
            error("bandwidth must be an integer multiple of grid_step");
    }
    if (config.threshold.kind == ThresholdSpec::Kind::Explicit && !(config.threshold.beta > 0.0))
        error("explicit threshold must be positive");
    if (config.threshold.kind == ThresholdSpec::Kind::LinearMc && config.threshold.n_mc < 100)
        error("linear-MC threshold needs n_mc >= 100");

    if (!report.errors.empty())
        return report;

    // Heuristics for the asymptotic assumptions; these are limits, not
    // finite-sample checks, so they only warn.
    const double ratio = horizon / config.bandwidth_h;
    if (config.threshold.kind == ThresholdSpec::Kind::GumbelSublinear) {
        if (ratio <= std::exp(1.0))
            warn("T/h <= e: the Gumbel threshold is undefined at this design");
        else if (config.bandwidth_h < 10.0 * std::log(ratio))
            warn("bandwidth small against log(T/h); the Gumbel approximation may be poor");
        if (ratio < 5.0)
            warn("T/h < 5: bandwidth is closer to the linear regime; consider the linear-MC threshold");
    }
    if (config.eta * config.bandwidth_h < 5.0 * config.grid_step)
        warn("eta-window spans under five grid points; local extrema may be unstable");
    return report;
}

Eigen::Index grid_steps(double span, double grid_step, const char* what) {
    if (!(grid_step > 0.0))
        throw validation_error("grid_step must be positive");
    const double steps = span / grid_step;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > relative_tolerance(steps)) {
        std::ostringstream msg;
        msg << what << " (" << span << ") is not an integer multiple of grid_step (" << grid_step
            << ")";
        throw validation_error(msg.str());
    }
    return static_cast<Eigen::Index>(rounded);
}

SampledPath counting_path(const EventSeries& events, double grid_step) {
    events.validate();
    const Eigen::Index n = grid_steps(events.horizon, grid_step, "horizon") + 1;
    SampledPath path;
    path.grid_step = grid_step;
    path.horizon = events.horizon;
    path.values.setZero(events.dim(), n);
    for (int j = 0; j < events.dim(); ++j) {
        const auto& comp = events.components[static_cast<std::size_t>(j)];
        std::size_t idx = 0;
        for (Eigen::Index k = 1; k < n; ++k) {
            // Last grid point is the horizon itself; avoids dropping events
            // at T to grid round-off.
            const double t = (k == n - 1) ? events.horizon : static_cast<double>(k) * grid_step;
            while (idx < comp.size() && comp[idx] <= t)
                ++idx;
            path.values(j, k) = static_cast<double>(idx);
        }
    }
    return path;
}

} // namespace mosum
