#pragma once

#include "mosum/detector.hpp"
#include "mosum/simulate.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace mosum {

struct Classification {
    std::vector<bool> detected; // one flag per true change
    int duplicates = 0;
    int spurious = 0;
};

/// A change is detected when an estimate lies in [c_i - h, c_i + h]. Each
/// estimate goes to the nearest covering change (ties to the earlier one);
/// extras inside a covered interval are duplicates, estimates covering no
/// change are spurious.
Classification classify_estimates(const std::vector<double>& estimates,
                                  const std::vector<double>& true_changes, double bandwidth);

struct ExperimentReport {
    std::string scenario;
    std::string estimator_mode; // "A" | "B" | "C" | "identity"
    int n_reps = 0;
    std::uint64_t base_seed = 0;
    std::vector<double> change_points;
    std::vector<double> detection_rates;
    double mean_spurious = 0.0;
    double mean_duplicate = 0.0;
    double rate_all_detected = 0.0;
    double rate_any_estimate = 0.0;
    SegmentationConfig config;
    double wall_clock_seconds = 0.0; // not serialized; timing only
};

ScaleMode estimator_mode_from_letter(const std::string& letter);
std::string estimator_mode_letter(ScaleMode mode);

/// Seeded replicate sweep over one scenario: simulate, segment, classify,
/// aggregate. Replicate r uses derive_seed(base_seed, r); a replicate failure
/// aborts the run.
ExperimentReport run_experiment(const RenewalScenario& scenario, const SegmentationConfig& config,
                                int n_reps, std::uint64_t base_seed,
                                unsigned threads = default_threads());

/// run_experiment with the simulation-study defaults (h = 120, eta = 0.75,
/// alpha = 0.05, unit grid, Gumbel threshold) and estimator letter A/B/C.
ExperimentReport run_table1(const RenewalScenario& scenario, const std::string& estimator_mode,
                            int n_reps, std::uint64_t base_seed,
                            unsigned threads = default_threads());

/// One CSV per bandwidth (t, m_1..m_p, norm, quadform, beta, significant,
/// estimate, true_change) for a single simulated realization of the
/// scenario. Returns the written paths.
std::vector<std::filesystem::path> emit_figure_series(const RenewalScenario& scenario,
                                                      const std::vector<double>& bandwidths,
                                                      const SegmentationConfig& base_config,
                                                      std::uint64_t seed,
                                                      const std::filesystem::path& out_dir);

} // namespace mosum
