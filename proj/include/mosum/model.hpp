#pragma once

#include "mosum/common.hpp"

#include <optional>

namespace mosum {

/// Per-component sorted event times on (0, T].
struct EventSeries {
    std::vector<std::vector<double>> components;
    double horizon = 0.0;

    EventSeries() = default;
    EventSeries(std::vector<std::vector<double>> comps, double T);

    /// Sorts each component first; duplicates still reject.
    static EventSeries from_unsorted(std::vector<std::vector<double>> comps, double T);

    int dim() const { return static_cast<int>(components.size()); }
    void validate() const;
};

/// Multivariate cumulative path on a uniform grid; values.col(k) = Z_{k * grid_step}.
struct SampledPath {
    double grid_step = 0.0;
    double horizon = 0.0;
    Matrix values; // p x (grid points)

    int dim() const { return static_cast<int>(values.rows()); }
    Eigen::Index grid_points() const { return values.cols(); }
    double time_at(Eigen::Index k) const { return static_cast<double>(k) * grid_step; }
};

/// True segmentation: change points plus the drift/covariance of each regime.
/// Regime labels are 1-based; segment j (0-based) covers (c_j, c_{j+1}] with
/// c_0 = 0 and c_{q+1} = T.
struct ChangeSpec {
    double horizon = 0.0;
    std::vector<double> change_points;            // c_1 < ... < c_q in (0, T)
    std::vector<int> regime_labels;               // q + 1 entries in {1..P}
    std::vector<Vector> drifts;                   // per regime
    std::vector<Matrix> covariances;              // per regime, SPD

    ChangeSpec() = default;
    ChangeSpec(double T, std::vector<double> changes, std::vector<int> labels,
               std::vector<Vector> mu, std::vector<Matrix> sigma);

    int dim() const { return drifts.empty() ? 0 : static_cast<int>(drifts.front().size()); }
    std::size_t segment_count() const { return change_points.size() + 1; }

    /// Index of the segment containing t under the convention t in (c_{j-1}, c_j].
    std::size_t segment_index(double t) const;
    const Vector& drift_of_segment(std::size_t seg) const;
    const Matrix& covariance_of_segment(std::size_t seg) const;
    const Vector& drift_at(double t) const { return drift_of_segment(segment_index(t)); }
    const Matrix& covariance_at(double t) const { return covariance_of_segment(segment_index(t)); }

    /// d_i = drift after change i minus drift before it (i is 0-based).
    Vector drift_change(std::size_t i) const;

    void validate() const;
};

enum class ScaleMode {
    LocalDiagonalEstimate, // (A) diagonal, locally estimated renewal variances
    TrueDiagonal,          // (B) diagonal of the true asymptotic covariance
    TrueFull,              // (C) full true asymptotic covariance
    Identity,
};

std::string to_string(ScaleMode mode);
ScaleMode scale_mode_from_string(const std::string& name);

struct ThresholdSpec {
    enum class Kind { GumbelSublinear, LinearMc, Explicit };
    Kind kind = Kind::GumbelSublinear;
    // LinearMc parameters
    int n_mc = 5000;
    int grid_points_per_unit = 2000;
    std::uint64_t seed = 1;
    // Explicit threshold
    double beta = 0.0;
};

struct SegmentationConfig {
    double bandwidth_h = 0.0;
    double eta = 0.75;
    double alpha = 0.05;
    double grid_step = 1.0;
    ScaleMode scale_mode = ScaleMode::LocalDiagonalEstimate;
    ThresholdSpec threshold;
    double variance_floor = 1e-8;
};

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

/// Structural violations land in errors, asymptotic-assumption heuristics in
/// warnings. Never throws.
ValidationReport validate_config(const SegmentationConfig& config, double horizon, int dim);

/// Counting path of the events on a uniform grid: component j of entry k is
/// the number of events in (0, k*grid_step]; an event exactly at a grid point
/// counts toward that grid point.
SampledPath counting_path(const EventSeries& events, double grid_step);

/// Number of grid steps in `span`, which must be an integer multiple of
/// `grid_step` up to floating tolerance.
Eigen::Index grid_steps(double span, double grid_step, const char* what);

} // namespace mosum
