#include "mosum/detector.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace mosum {

std::vector<double> SegmentationResult::estimate_times() const {
    std::vector<double> times;
    times.reserve(estimates.size());
    for (const auto& e : estimates)
        times.push_back(e.time);
    return times;
}

SegmentationResult significant_local_extrema(const MosumSeries& series, double beta, double eta,
                                             double bandwidth) {
    if (!series.has_quadform())
        throw validation_error("quadratic form must be filled before extrema detection");
    if (!(beta > 0.0))
        throw validation_error("threshold beta must be positive");
    if (!(eta > 0.0 && eta < 1.0))
        throw validation_error("eta must lie in (0, 1)");

    const Eigen::Index m = series.size();
    // eta-window radius in grid steps; the window is intersected with the
    // grid range of [h, T-h].
    const auto radius = static_cast<Eigen::Index>(
        std::floor(eta * bandwidth / series.grid_step + 1e-9));

    SegmentationResult result;
    result.horizon = series.horizon;
    result.dim = series.dim();
    result.beta_used = beta;

    for (Eigen::Index j = 0; j < m; ++j) {
        if (series.quadform[j] < beta)
            continue;
        const Eigen::Index lo = std::max<Eigen::Index>(0, j - radius);
        const Eigen::Index hi = std::min<Eigen::Index>(m - 1, j + radius);
        const double value = series.norms[j];
        bool is_extremum = true;
        for (Eigen::Index i = lo; i <= hi; ++i) {
            // Smallest maximizer wins: any strictly larger neighbour, or an
            // equal one to the left, disqualifies j.
            if (series.norms[i] > value || (i < j && series.norms[i] == value)) {
                is_extremum = false;
                break;
            }
        }
        if (!is_extremum)
            continue;
        EstimateRecord rec;
        rec.time = series.time_at(j);
        rec.peak_norm = value;
        rec.peak_quadform = series.quadform[j];
        rec.window_lo = series.time_at(lo);
        rec.window_hi = series.time_at(hi);
        result.estimates.push_back(std::move(rec));
    }
    return result;
}

namespace {

// Difference of the windowed increment means around the estimate,
// (Z_{c+h} - Z_c)/h - (Z_c - Z_{c-h})/h.
Vector drift_change_estimate(const SampledPath& path, double time, double bandwidth) {
    const Eigen::Index kh = grid_steps(bandwidth, path.grid_step, "bandwidth");
    const auto k = static_cast<Eigen::Index>(std::llround(time / path.grid_step));
    const Vector right = path.values.col(k + kh) - path.values.col(k);
    const Vector left = path.values.col(k) - path.values.col(k - kh);
    return (right - left) / bandwidth;
}

double projected_variance(const ScaleProvider& scale, double t, const Vector& direction) {
    if (direction.norm() == 0.0)
        return 0.0;
    const Vector u = direction / direction.norm();
    return u.dot(scale.matrix_at(t) * u);
}

ThresholdResult resolve_threshold(const SegmentationConfig& config, double horizon, int dim,
                                  unsigned threads) {
    switch (config.threshold.kind) {
    case ThresholdSpec::Kind::GumbelSublinear:
        return threshold_sublinear(horizon, config.bandwidth_h, dim, config.alpha);
    case ThresholdSpec::Kind::LinearMc: {
        auto result = threshold_linear_mc(config.bandwidth_h / horizon, dim, config.alpha,
                                          config.threshold.n_mc,
                                          config.threshold.grid_points_per_unit,
                                          config.threshold.seed, threads);
        result.horizon = horizon;
        result.bandwidth = config.bandwidth_h;
        return result;
    }
    case ThresholdSpec::Kind::Explicit: {
        ThresholdResult result;
        result.beta = config.threshold.beta;
        result.mode = "explicit";
        result.horizon = horizon;
        result.bandwidth = config.bandwidth_h;
        result.dim = dim;
        result.alpha = config.alpha;
        return result;
    }
    }
    throw validation_error("unknown threshold mode");
}

} // namespace

SegmentationResult segment(const SampledPath& path, const EventSeries* events,
                           const ChangeSpec* spec, const SegmentationConfig& config) {
    auto report = validate_config(config, path.horizon, path.dim());
    if (!report.ok()) {
        std::ostringstream msg;
        msg << "invalid segmentation config:";
        for (const auto& e : report.errors)
            msg << " " << e << ";";
        throw validation_error(msg.str());
    }

    const auto scale = build_scale_provider(config.scale_mode, events, spec, config,
                                            path.horizon, path.dim());
    MosumSeries series = mosum_statistic(path, config.bandwidth_h);
    quadratic_form_series(series, *scale);
    // Per-replicate seed derivation makes the MC threshold identical for any
    // thread count, so parallelism here does not affect the result.
    const ThresholdResult threshold =
        resolve_threshold(config, path.horizon, path.dim(), default_threads());

    SegmentationResult result =
        significant_local_extrema(series, threshold.beta, config.eta, config.bandwidth_h);
    result.config = config;
    result.threshold = threshold;
    result.warnings = report.warnings;
    for (auto& estimate : result.estimates) {
        estimate.d_hat = drift_change_estimate(path, estimate.time, config.bandwidth_h);
        estimate.sigma2_pre =
            projected_variance(*scale, estimate.time - config.bandwidth_h, estimate.d_hat);
        estimate.sigma2_post =
            projected_variance(*scale, estimate.time + config.bandwidth_h, estimate.d_hat);
    }
    return result;
}

SegmentationResult segment(const EventSeries& events, const ChangeSpec* spec,
                           const SegmentationConfig& config) {
    const SampledPath path = counting_path(events, config.grid_step);
    return segment(path, &events, spec, config);
}

std::array<double, 4> limit_sigma_params(double sigma2_pre, double sigma2_post) {
    if (!(sigma2_pre >= 0.0 && sigma2_post >= 0.0))
        throw validation_error("projected variances must be nonnegative");
    const double pre = std::sqrt(sigma2_pre);
    const double post = std::sqrt(sigma2_post);
    return {pre, pre, post, post};
}

LimitLawQuantiles simulate_argmax_limit(const std::array<double, 4>& sigma_params, int n_mc,
                                        double horizon_D, double step, std::uint64_t seed,
                                        unsigned threads) {
    for (double s : sigma_params)
        if (!(s >= 0.0))
            throw validation_error("sigma parameters must be nonnegative");
    const double var_left = sigma_params[0] * sigma_params[0] +
                            4.0 * sigma_params[1] * sigma_params[1] +
                            sigma_params[3] * sigma_params[3];
    const double var_right = sigma_params[0] * sigma_params[0] +
                             4.0 * sigma_params[2] * sigma_params[2] +
                             sigma_params[3] * sigma_params[3];
    if (!(var_left > 0.0) && !(var_right > 0.0))
        throw validation_error("at least one sigma parameter must be positive");
    if (n_mc < 100)
        throw validation_error("argmax simulation needs n_mc >= 100");
    if (!(step > 0.0) || !(horizon_D > step))
        throw validation_error("need 0 < step < horizon_D");

    const auto K = static_cast<Eigen::Index>(std::ceil(horizon_D / step - 1e-9));
    const double sd_left = std::sqrt(var_left * step);
    const double sd_right = std::sqrt(var_right * step);

    std::vector<double> argmaxes(static_cast<std::size_t>(n_mc));
    std::vector<unsigned char> boundary(static_cast<std::size_t>(n_mc), 0);
    parallel_for(static_cast<std::size_t>(n_mc), threads, [&](std::size_t r) {
        std::mt19937_64 rng(derive_seed(seed, r));
        std::normal_distribution<double> normal;
        double best = 0.0; // Psi_0 = 0
        double best_t = 0.0;
        // Left side scanned outward from 0 so the smaller |t| wins exact ties.
        double level = 0.0;
        for (Eigen::Index k = 1; k <= K; ++k) {
            const double t = -static_cast<double>(k) * step;
            level += sd_left * normal(rng);
            const double value = t + level; // -|t| + sigma B
            if (value > best) {
                best = value;
                best_t = t;
            }
        }
        level = 0.0;
        for (Eigen::Index k = 1; k <= K; ++k) {
            const double t = static_cast<double>(k) * step;
            level += sd_right * normal(rng);
            const double value = -t + level;
            if (value > best) {
                best = value;
                best_t = t;
            }
        }
        argmaxes[r] = best_t;
        boundary[r] = std::abs(best_t) >= (static_cast<double>(K) - 0.5) * step ? 1 : 0;
    });

    long hits = 0;
    for (auto b : boundary)
        hits += b;
    if (static_cast<double>(hits) >= 0.01 * static_cast<double>(n_mc)) {
        std::ostringstream msg;
        msg << "argmax hit the simulation boundary in " << hits << "/" << n_mc
            << " replicates; increase horizon_D (current " << horizon_D << ")";
        throw numeric_error(msg.str());
    }

    LimitLawQuantiles result;
    result.sigma = sigma_params;
    result.sigma_left = std::sqrt(var_left);
    result.sigma_right = std::sqrt(var_right);
    result.n_mc = n_mc;
    result.seed = seed;
    result.horizon = horizon_D;
    result.step = step;
    std::sort(argmaxes.begin(), argmaxes.end());
    result.sample = std::move(argmaxes);
    return result;
}

ConfidenceInterval confidence_interval(double estimate, const Vector& d_hat,
                                       const LimitLawQuantiles& quantiles, double alpha,
                                       double horizon) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw validation_error("alpha must lie in (0, 1)");
    const double scale = d_hat.squaredNorm();
    if (!(scale > 0.0))
        throw validation_error("drift-change estimate must be nonzero for a confidence interval");
    ConfidenceInterval ci;
    ci.alpha = alpha;
    ci.lower = std::clamp(estimate + quantiles.quantile(alpha / 2.0) / scale, 0.0, horizon);
    ci.upper = std::clamp(estimate + quantiles.quantile(1.0 - alpha / 2.0) / scale, 0.0, horizon);
    return ci;
}

} // namespace mosum
