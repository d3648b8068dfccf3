#include "mosum/experiment.hpp"

#include "mosum/io.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mosum {

Classification classify_estimates(const std::vector<double>& estimates,
                                  const std::vector<double>& true_changes, double bandwidth) {
    if (!std::is_sorted(true_changes.begin(), true_changes.end()))
        throw validation_error("true changes must be sorted");
    Classification out;
    out.detected.assign(true_changes.size(), false);
    std::vector<int> assigned(true_changes.size(), 0);
    for (double est : estimates) {
        // Nearest change whose interval [c - h, c + h] covers the estimate;
        // ties go to the earlier change.
        std::ptrdiff_t best = -1;
        double best_dist = 0.0;
        for (std::size_t i = 0; i < true_changes.size(); ++i) {
            const double dist = std::abs(est - true_changes[i]);
            if (dist > bandwidth)
                continue;
            if (best < 0 || dist < best_dist) {
                best = static_cast<std::ptrdiff_t>(i);
                best_dist = dist;
            }
        }
        if (best < 0)
            ++out.spurious;
        else
            ++assigned[static_cast<std::size_t>(best)];
    }
    for (std::size_t i = 0; i < true_changes.size(); ++i) {
        out.detected[i] = assigned[i] > 0;
        if (assigned[i] > 1)
            out.duplicates += assigned[i] - 1;
    }
    return out;
}

ScaleMode estimator_mode_from_letter(const std::string& letter) {
    if (letter == "A" || letter == "a") return ScaleMode::LocalDiagonalEstimate;
    if (letter == "B" || letter == "b") return ScaleMode::TrueDiagonal;
    if (letter == "C" || letter == "c") return ScaleMode::TrueFull;
    if (letter == "identity" || letter == "I") return ScaleMode::Identity;
    throw validation_error("unknown estimator mode '" + letter + "' (expected A, B or C)");
}

std::string estimator_mode_letter(ScaleMode mode) {
    switch (mode) {
    case ScaleMode::LocalDiagonalEstimate: return "A";
    case ScaleMode::TrueDiagonal: return "B";
    case ScaleMode::TrueFull: return "C";
    case ScaleMode::Identity: return "identity";
    }
    throw validation_error("unknown scale mode");
}

ExperimentReport run_experiment(const RenewalScenario& scenario, const SegmentationConfig& config,
                                int n_reps, std::uint64_t base_seed, unsigned threads) {
    scenario.validate();
    if (n_reps < 1)
        throw validation_error("need at least one replicate");
    const auto started = std::chrono::steady_clock::now();
    const ChangeSpec spec = scenario.to_change_spec();
    const auto n = static_cast<std::size_t>(n_reps);

    std::vector<Classification> results(n);
    parallel_for(n, threads, [&](std::size_t r) {
        const EventSeries events = simulate_renewal_regimes(scenario, derive_seed(base_seed, r));
        const SegmentationResult seg = segment(events, &spec, config);
        results[r] = classify_estimates(seg.estimate_times(), scenario.change_points,
                                        config.bandwidth_h);
    });

    ExperimentReport report;
    report.scenario = scenario.name;
    report.estimator_mode = estimator_mode_letter(config.scale_mode);
    report.n_reps = n_reps;
    report.base_seed = base_seed;
    report.change_points = scenario.change_points;
    report.config = config;
    report.detection_rates.assign(scenario.change_points.size(), 0.0);
    long spurious = 0;
    long duplicates = 0;
    long all_detected = 0;
    long any_estimate = 0;
    for (const auto& c : results) {
        bool all = true;
        bool any = c.spurious > 0;
        for (std::size_t i = 0; i < c.detected.size(); ++i) {
            if (c.detected[i]) {
                report.detection_rates[i] += 1.0;
                any = true;
            } else {
                all = false;
            }
        }
        spurious += c.spurious;
        duplicates += c.duplicates;
        all_detected += all ? 1 : 0;
        any_estimate += any ? 1 : 0;
    }
    const double denom = static_cast<double>(n_reps);
    for (auto& rate : report.detection_rates)
        rate /= denom;
    report.mean_spurious = static_cast<double>(spurious) / denom;
    report.mean_duplicate = static_cast<double>(duplicates) / denom;
    report.rate_all_detected = static_cast<double>(all_detected) / denom;
    report.rate_any_estimate = static_cast<double>(any_estimate) / denom;
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

ExperimentReport run_table1(const RenewalScenario& scenario, const std::string& estimator_mode,
                            int n_reps, std::uint64_t base_seed, unsigned threads) {
    SegmentationConfig config;
    config.bandwidth_h = 120.0;
    config.eta = 0.75;
    config.alpha = 0.05;
    config.grid_step = 1.0;
    config.scale_mode = estimator_mode_from_letter(estimator_mode);
    config.threshold.kind = ThresholdSpec::Kind::GumbelSublinear;
    return run_experiment(scenario, config, n_reps, base_seed, threads);
}

std::vector<std::filesystem::path> emit_figure_series(const RenewalScenario& scenario,
                                                      const std::vector<double>& bandwidths,
                                                      const SegmentationConfig& base_config,
                                                      std::uint64_t seed,
                                                      const std::filesystem::path& out_dir) {
    scenario.validate();
    if (bandwidths.empty())
        throw validation_error("need at least one bandwidth");
    std::filesystem::create_directories(out_dir);
    const ChangeSpec spec = scenario.to_change_spec();
    const EventSeries events = simulate_renewal_regimes(scenario, seed);
    const SampledPath path = counting_path(events, base_config.grid_step);

    std::vector<std::filesystem::path> written;
    for (double h : bandwidths) {
        SegmentationConfig config = base_config;
        config.bandwidth_h = h;
        const SegmentationResult result = segment(path, &events, &spec, config);
        const MosumSeries series = [&] {
            MosumSeries s = mosum_statistic(path, h);
            const auto scale = build_scale_provider(config.scale_mode, &events, &spec, config,
                                                    path.horizon, path.dim());
            quadratic_form_series(s, *scale);
            return s;
        }();

        const std::vector<double> estimates = result.estimate_times();
        std::ostringstream name;
        name << "mosum_h" << static_cast<long long>(std::llround(h)) << ".csv";
        const auto file = out_dir / name.str();
        std::ofstream out(file);
        if (!out)
            throw std::runtime_error("cannot write " + file.string());
        out << "t";
        for (int i = 1; i <= series.dim(); ++i)
            out << ",m_" << i;
        out << ",norm,quadform,beta,significant,estimate,true_change\n";
        for (Eigen::Index j = 0; j < series.size(); ++j) {
            const double t = series.time_at(j);
            out << format_double(t);
            for (int i = 0; i < series.dim(); ++i)
                out << ',' << format_double(series.vectors(i, j));
            const bool is_estimate =
                std::find(estimates.begin(), estimates.end(), t) != estimates.end();
            const bool is_change =
                std::find(scenario.change_points.begin(), scenario.change_points.end(), t) !=
                scenario.change_points.end();
            out << ',' << format_double(series.norms[j]) << ','
                << format_double(series.quadform[j]) << ',' << format_double(result.beta_used)
                << ',' << (series.quadform[j] >= result.beta_used ? 1 : 0) << ','
                << (is_estimate ? 1 : 0) << ',' << (is_change ? 1 : 0) << '\n';
        }
        written.push_back(file);
    }
    return written;
}

} // namespace mosum
