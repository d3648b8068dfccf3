#pragma once

#include "mosum/common.hpp"

#include <cstdint>
#include <string>

namespace mosum {

struct ThresholdResult {
    double beta = 0.0;
    std::string mode;          // "gumbel" | "linear_mc" | "explicit"
    double horizon = 0.0;      // T (0 when not applicable)
    double bandwidth = 0.0;    // h
    int dim = 0;               // p
    double alpha = 0.0;
    double gamma = 0.0;        // h / T for linear_mc
    int n_mc = 0;
    int grid_points_per_unit = 0;
    std::uint64_t seed = 0;
};

/// Normalizing constants of the Gumbel limit for the sup of the root
/// quadratic form at sublinear bandwidths:
///   a(x) = sqrt(2 log x)
///   b(x) = 2 log x + (p/2) log log x + log(3/2) - log Gamma(p/2)
/// Requires x > e.
std::pair<double, double> gumbel_constants(double x, int dim);

/// Inverse of P(E <= x) = exp(-2 exp(-x)):  g = -log(-log(1 - alpha) / 2).
double gumbel_quantile(double alpha);
double gumbel_cdf(double x);

/// (1 - alpha)-quantile of the Gumbel limit, squared so it thresholds the
/// quadratic form M' A^{-1} M directly:  beta = ((b(T/h) + g) / a(T/h))^2.
ThresholdResult threshold_sublinear(double horizon, double bandwidth, int dim, double alpha);

/// Empirical (1 - alpha)-quantile of
///   sup_{gamma <= s <= 1-gamma} (1/2gamma) |B_{s+gamma} - 2 B_s + B_{s-gamma}|^2
/// over n_mc standard p-dimensional Wiener paths on [0,1]; deterministic
/// given the seed for any thread count.
ThresholdResult threshold_linear_mc(double gamma, int dim, double alpha, int n_mc,
                                    int grid_points_per_unit, std::uint64_t seed,
                                    unsigned threads = default_threads());

} // namespace mosum
