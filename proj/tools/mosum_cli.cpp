// Command-line front end: simulate scenarios, compute thresholds, segment
// event/path data, build confidence intervals, and reproduce the simulation
// study tables and figure series.

#include "mosum/io.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace mosum;
using nlohmann::json;

struct SegmentOptions {
    std::string events_file;
    std::string path_file;
    std::string spec_file;
    std::string config_file;
    std::string out_file;
    std::string mosum_out;
    double horizon = 0.0;
    SegmentationConfig config;
    std::string scale_mode = "local_diag";
    std::string threshold_mode = "gumbel";
    double explicit_beta = 0.0;
};

void emit(const json& j, const std::string& out_file) {
    if (out_file.empty())
        std::cout << dump_json(j);
    else
        write_json(j, out_file);
}

int run_simulate(const std::string& scenario_name, std::uint64_t seed,
                 const std::string& out_events, const std::string& out_path, double grid_step) {
    const RenewalScenario scenario = load_scenario(scenario_name);
    const EventSeries events = simulate_renewal_regimes(scenario, seed);
    if (!out_events.empty())
        write_events_csv(events, out_events);
    else if (out_path.empty())
        write_events_csv(events, std::cout);
    if (!out_path.empty())
        write_path_csv(counting_path(events, grid_step), out_path);
    long total = 0;
    for (const auto& c : events.components)
        total += static_cast<long>(c.size());
    std::cerr << "simulated scenario '" << scenario.name << "' seed " << seed << ": " << total
              << " events over " << scenario.dim << " components, T = " << scenario.horizon
              << "\n";
    return 0;
}

int run_threshold(const std::string& mode, double T, double h, int p, double alpha, double gamma,
                  int n_mc, int grid_points, std::uint64_t seed, const std::string& out_file) {
    ThresholdResult result;
    if (mode == "gumbel") {
        result = threshold_sublinear(T, h, p, alpha);
    } else if (mode == "linear-mc" || mode == "linear_mc") {
        double g = gamma;
        if (g <= 0.0) {
            if (T <= 0.0 || h <= 0.0)
                throw validation_error("linear-mc needs --gamma or both --T and --h");
            g = h / T;
        }
        result = threshold_linear_mc(g, p, alpha, n_mc, grid_points, seed);
        result.horizon = T;
        result.bandwidth = h;
    } else {
        throw validation_error("unknown threshold mode '" + mode + "'");
    }
    emit(to_json(result), out_file);
    return 0;
}

SegmentationConfig build_config(const SegmentOptions& opt, const CLI::App* cmd) {
    SegmentationConfig config;
    if (!opt.config_file.empty())
        config = segmentation_config_from_json(read_json(opt.config_file));
    auto given = [&](const std::string& flag) { return cmd->count(flag) > 0; };
    if (opt.config_file.empty() || given("--h"))
        config.bandwidth_h = opt.config.bandwidth_h;
    if (opt.config_file.empty() || given("--eta"))
        config.eta = opt.config.eta;
    if (opt.config_file.empty() || given("--alpha"))
        config.alpha = opt.config.alpha;
    if (opt.config_file.empty() || given("--grid-step"))
        config.grid_step = opt.config.grid_step;
    if (opt.config_file.empty() || given("--variance-floor"))
        config.variance_floor = opt.config.variance_floor;
    if (opt.config_file.empty() || given("--scale-mode"))
        config.scale_mode = scale_mode_from_string(opt.scale_mode);
    if (opt.config_file.empty() || given("--threshold-mode") || given("--beta")) {
        if (opt.threshold_mode == "gumbel") {
            config.threshold.kind = ThresholdSpec::Kind::GumbelSublinear;
        } else if (opt.threshold_mode == "linear-mc" || opt.threshold_mode == "linear_mc") {
            config.threshold.kind = ThresholdSpec::Kind::LinearMc;
            config.threshold.n_mc = opt.config.threshold.n_mc;
            config.threshold.grid_points_per_unit = opt.config.threshold.grid_points_per_unit;
            config.threshold.seed = opt.config.threshold.seed;
        } else if (opt.threshold_mode == "explicit") {
            config.threshold.kind = ThresholdSpec::Kind::Explicit;
            config.threshold.beta = opt.explicit_beta;
        } else {
            throw validation_error("unknown threshold mode '" + opt.threshold_mode + "'");
        }
    }
    return config;
}

int run_segment(const SegmentOptions& opt, const CLI::App* cmd) {
    const SegmentationConfig config = build_config(opt, cmd);

    std::optional<ChangeSpec> spec;
    if (!opt.spec_file.empty())
        spec = change_spec_from_json(read_json(opt.spec_file));

    SegmentationResult result;
    SampledPath path;
    std::optional<EventSeries> events;
    if (!opt.events_file.empty()) {
        EventSeries raw = read_events_csv(opt.events_file);
        if (opt.horizon > 0.0)
            raw = EventSeries(std::move(raw.components), opt.horizon);
        events = std::move(raw);
        path = counting_path(*events, config.grid_step);
    } else if (!opt.path_file.empty()) {
        path = read_path_csv(opt.path_file);
    } else {
        throw validation_error("segment needs --events or --path");
    }
    result = segment(path, events ? &*events : nullptr, spec ? &*spec : nullptr, config);

    if (!opt.mosum_out.empty()) {
        MosumSeries series = mosum_statistic(path, config.bandwidth_h);
        const auto scale =
            build_scale_provider(config.scale_mode, events ? &*events : nullptr,
                                 spec ? &*spec : nullptr, config, path.horizon, path.dim());
        quadratic_form_series(series, *scale);
        write_mosum_csv(series, opt.mosum_out);
    }
    emit(to_json(result), opt.out_file);
    return 0;
}

int run_ci(const std::string& result_file, double alpha, int n_mc, std::uint64_t seed,
           bool equal_variance, const std::string& out_file) {
    const SegmentationResult result =
        segmentation_result_from_json(read_json(result_file));
    json intervals = json::array();
    for (std::size_t i = 0; i < result.estimates.size(); ++i) {
        const auto& est = result.estimates[i];
        std::array<double, 4> sigma{};
        if (equal_variance) {
            const double pooled = std::sqrt(0.5 * (est.sigma2_pre + est.sigma2_post));
            sigma = {pooled, pooled, pooled, pooled};
        } else {
            sigma = limit_sigma_params(est.sigma2_pre, est.sigma2_post);
        }
        const double top =
            std::max({sigma[0] * sigma[0] + 4 * sigma[1] * sigma[1] + sigma[3] * sigma[3],
                      sigma[0] * sigma[0] + 4 * sigma[2] * sigma[2] + sigma[3] * sigma[3], 1.0});
        const double horizon_D = 30.0 * top;
        const double step = top / 50.0;
        const LimitLawQuantiles quantiles = simulate_argmax_limit(
            sigma, n_mc, horizon_D, step, derive_seed(seed, i));
        const ConfidenceInterval ci =
            confidence_interval(est.time, est.d_hat, quantiles, alpha, result.horizon);
        intervals.push_back(json{{"estimate", est.time},
                                 {"lower", ci.lower},
                                 {"upper", ci.upper},
                                 {"alpha", alpha},
                                 {"d_hat_norm2", est.d_hat.squaredNorm()},
                                 {"sigma", std::vector<double>(sigma.begin(), sigma.end())}});
    }
    emit(json{{"schema_version", 1},
              {"alpha", alpha},
              {"n_mc", n_mc},
              {"seed", seed},
              {"equal_variance", equal_variance},
              {"intervals", std::move(intervals)}},
         out_file);
    return 0;
}

int run_experiment_cmd(const std::string& scenario_name, const std::string& mode, int reps,
                       std::uint64_t seed, unsigned threads, double h, double eta, double alpha,
                       const std::string& out_file) {
    const RenewalScenario scenario = load_scenario(scenario_name);
    SegmentationConfig config;
    config.bandwidth_h = h;
    config.eta = eta;
    config.alpha = alpha;
    config.scale_mode = estimator_mode_from_letter(mode);
    config.threshold.kind = ThresholdSpec::Kind::GumbelSublinear;
    const ExperimentReport report = run_experiment(scenario, config, reps, seed, threads);
    std::cerr << "experiment '" << scenario.name << "' mode " << report.estimator_mode << ": "
              << reps << " replicates in " << report.wall_clock_seconds << " s\n";
    emit(to_json(report), out_file);
    return 0;
}

int run_figures(const std::string& scenario_name, const std::string& bandwidths_arg,
                std::uint64_t seed, const std::string& mode, double grid_step,
                const std::string& out_dir) {
    const RenewalScenario scenario = load_scenario(scenario_name);
    std::vector<double> bandwidths;
    std::istringstream in(bandwidths_arg);
    std::string token;
    while (std::getline(in, token, ','))
        if (!token.empty())
            bandwidths.push_back(std::stod(token));
    SegmentationConfig config;
    config.eta = 0.75;
    config.alpha = 0.05;
    config.grid_step = grid_step;
    config.scale_mode = estimator_mode_from_letter(mode);
    const auto files = emit_figure_series(scenario, bandwidths, config, seed, out_dir);
    json listing = json::array();
    for (const auto& f : files)
        listing.push_back(f.string());
    std::cout << dump_json(json{{"scenario", scenario.name},
                                {"true_changes", scenario.change_points},
                                {"files", std::move(listing)}});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MOSUM data segmentation for regime-switching multivariate processes"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a renewal scenario to an events CSV");
    std::string sim_scenario = "constvar-independent";
    std::uint64_t sim_seed = 1;
    std::string sim_out;
    std::string sim_path_out;
    double sim_grid = 1.0;
    sim->add_option("--scenario", sim_scenario,
                    "Preset name or scenario JSON file (presets: constvar/smallvar/poisson x "
                    "independent/dependent, univariate-demo, multiscale)");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--out", sim_out, "Events CSV output (stdout when omitted)");
    sim->add_option("--path-out", sim_path_out, "Also write the counting path CSV");
    sim->add_option("--grid-step", sim_grid, "Grid step for --path-out");

    // threshold
    auto* thr = app.add_subcommand("threshold", "Compute the significance threshold beta");
    std::string thr_mode = "gumbel";
    double thr_T = 0.0, thr_h = 0.0, thr_alpha = 0.05, thr_gamma = 0.0;
    int thr_p = 1, thr_nmc = 5000, thr_grid = 2000;
    std::uint64_t thr_seed = 1;
    std::string thr_out;
    thr->add_option("--mode", thr_mode, "gumbel | linear-mc");
    thr->add_option("--T", thr_T, "Horizon");
    thr->add_option("--h", thr_h, "Bandwidth");
    thr->add_option("--p", thr_p, "Dimension");
    thr->add_option("--alpha", thr_alpha, "Significance level");
    thr->add_option("--gamma", thr_gamma, "Relative bandwidth h/T for linear-mc");
    thr->add_option("--n-mc", thr_nmc, "Monte Carlo replicates");
    thr->add_option("--grid-points", thr_grid, "Grid points per unit time on [0,1]");
    thr->add_option("--seed", thr_seed, "RNG seed");
    thr->add_option("--out", thr_out, "JSON output file (stdout when omitted)");

    // segment
    auto* seg = app.add_subcommand("segment", "Segment an events or path CSV");
    SegmentOptions seg_opt;
    seg_opt.config.bandwidth_h = 120.0;
    seg->add_option("--events", seg_opt.events_file, "Events CSV (component_id,time)");
    seg->add_option("--path", seg_opt.path_file, "Path CSV (t,z_1,...)");
    seg->add_option("--T", seg_opt.horizon,
                    "Observation horizon (defaults to the last event time)");
    seg->add_option("--spec", seg_opt.spec_file, "Oracle ChangeSpec JSON for true_* scale modes");
    seg->add_option("--config", seg_opt.config_file, "SegmentationConfig JSON");
    seg->add_option("--h", seg_opt.config.bandwidth_h, "Bandwidth");
    seg->add_option("--eta", seg_opt.config.eta, "Locality parameter in (0,1)");
    seg->add_option("--alpha", seg_opt.config.alpha, "Significance level");
    seg->add_option("--grid-step", seg_opt.config.grid_step, "Evaluation grid step");
    seg->add_option("--variance-floor", seg_opt.config.variance_floor, "Variance floor");
    seg->add_option("--scale-mode", seg_opt.scale_mode,
                    "local_diag | true_diag | true_full | identity");
    seg->add_option("--threshold-mode", seg_opt.threshold_mode, "gumbel | linear-mc | explicit");
    seg->add_option("--beta", seg_opt.explicit_beta, "Explicit threshold value");
    seg->add_option("--mc-n", seg_opt.config.threshold.n_mc, "linear-mc replicates");
    seg->add_option("--mc-grid", seg_opt.config.threshold.grid_points_per_unit,
                    "linear-mc grid points");
    seg->add_option("--mc-seed", seg_opt.config.threshold.seed, "linear-mc seed");
    seg->add_option("--out", seg_opt.out_file, "Result JSON (stdout when omitted)");
    seg->add_option("--mosum-out", seg_opt.mosum_out, "Optional MOSUM series CSV dump");

    // ci
    auto* ci = app.add_subcommand("ci", "Confidence intervals from a segmentation result");
    std::string ci_result;
    double ci_alpha = 0.1;
    int ci_nmc = 5000;
    std::uint64_t ci_seed = 1;
    bool ci_equal = false;
    std::string ci_out;
    ci->add_option("--result", ci_result, "Segmentation result JSON")->required();
    ci->add_option("--alpha", ci_alpha, "Two-sided level (0.1 gives 90% intervals)");
    ci->add_option("--n-mc", ci_nmc, "Monte Carlo replicates for the argmax law");
    ci->add_option("--seed", ci_seed, "RNG seed");
    ci->add_flag("--equal-variance", ci_equal, "Use the sqrt(6) sigma single-parameter form");
    ci->add_option("--out", ci_out, "JSON output file (stdout when omitted)");

    // experiment
    auto* exp = app.add_subcommand("experiment", "Replicate sweep: simulate, segment, classify");
    std::string exp_scenario = "constvar-independent", exp_mode = "B", exp_out;
    int exp_reps = 2000;
    std::uint64_t exp_seed = 1;
    unsigned exp_threads = default_threads();
    double exp_h = 120.0, exp_eta = 0.75, exp_alpha = 0.05;
    exp->add_option("--scenario", exp_scenario, "Preset name or scenario JSON file");
    exp->add_option("--mode", exp_mode, "Estimator: A (local diag), B (true diag), C (true full)");
    exp->add_option("--reps", exp_reps, "Replicates");
    exp->add_option("--seed", exp_seed, "Base seed");
    exp->add_option("--threads", exp_threads, "Worker threads (result is thread-count invariant)");
    exp->add_option("--h", exp_h, "Bandwidth");
    exp->add_option("--eta", exp_eta, "Locality parameter");
    exp->add_option("--alpha", exp_alpha, "Significance level");
    exp->add_option("--out", exp_out, "Report JSON (stdout when omitted)");

    // figures
    auto* fig = app.add_subcommand("figures", "Per-bandwidth MOSUM series CSV exports");
    std::string fig_scenario = "multiscale", fig_bandwidths = "30,60,90,120", fig_mode = "A";
    std::uint64_t fig_seed = 1;
    double fig_grid = 1.0;
    std::string fig_out = "figures";
    fig->add_option("--scenario", fig_scenario, "Preset name or scenario JSON file");
    fig->add_option("--bandwidths", fig_bandwidths, "Comma-separated bandwidth list");
    fig->add_option("--seed", fig_seed, "RNG seed");
    fig->add_option("--mode", fig_mode, "Estimator mode A|B|C|identity");
    fig->add_option("--grid-step", fig_grid, "Evaluation grid step");
    fig->add_option("--out", fig_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return run_simulate(sim_scenario, sim_seed, sim_out, sim_path_out, sim_grid);
        if (thr->parsed())
            return run_threshold(thr_mode, thr_T, thr_h, thr_p, thr_alpha, thr_gamma, thr_nmc,
                                 thr_grid, thr_seed, thr_out);
        if (seg->parsed())
            return run_segment(seg_opt, seg);
        if (ci->parsed())
            return run_ci(ci_result, ci_alpha, ci_nmc, ci_seed, ci_equal, ci_out);
        if (exp->parsed())
            return run_experiment_cmd(exp_scenario, exp_mode, exp_reps, exp_seed, exp_threads,
                                      exp_h, exp_eta, exp_alpha, exp_out);
        if (fig->parsed())
            return run_figures(fig_scenario, fig_bandwidths, fig_seed, fig_mode, fig_grid,
                               fig_out);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
