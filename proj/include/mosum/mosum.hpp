#pragma once

#include "mosum/model.hpp"
#include "mosum/scale.hpp"

namespace mosum {

/// MOSUM vectors M_t on the grid points of [h, T-h], plus the quadratic form
/// M_t' A_t^{-1} M_t once a scale provider has been applied.
struct MosumSeries {
    double grid_step = 0.0;
    double horizon = 0.0;
    double bandwidth = 0.0;
    Eigen::Index first_grid_index = 0; // grid index of t = h
    Matrix vectors;                    // p x m
    Vector norms;                      // m, Euclidean norm of M_t
    Vector quadform;                   // m, empty until quadratic_form_series

    Eigen::Index size() const { return vectors.cols(); }
    int dim() const { return static_cast<int>(vectors.rows()); }
    double time_at(Eigen::Index j) const {
        return static_cast<double>(first_grid_index + j) * grid_step;
    }
    bool has_quadform() const { return quadform.size() == size(); }
};

/// M_t = (Z_{t+h} - 2 Z_t + Z_{t-h}) / sqrt(2h) on every grid point of
/// [h, T-h]. h must be a grid multiple with 2h < T.
MosumSeries mosum_statistic(const SampledPath& path, double bandwidth);

/// Deterministic signal term m_t: superposition of tents
/// (h - |t - c_i|)^+ d_i / sqrt(2h). This is the exact second difference of
/// the integrated drift, and reduces to the paper-style single-tent form
/// whenever h <= Delta_i / 2.
Vector signal_term(const ChangeSpec& spec, double bandwidth, double t);

/// Fills quadform[j] = M_t' A_t^{-1} M_t using a symmetric positive definite
/// solve (diagonal fast path when the provider is diagonal).
void quadratic_form_series(MosumSeries& series, const ScaleProvider& scale);

} // namespace mosum
