#include "mosum/threshold.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace mosum {

std::pair<double, double> gumbel_constants(double x, int dim) {
    if (dim < 1)
        throw validation_error("dimension must be at least 1");
    if (!(x > std::exp(1.0)))
        throw validation_error("gumbel constants need x = T/h > e");
    const double logx = std::log(x);
    const double a = std::sqrt(2.0 * logx);
    const double p = static_cast<double>(dim);
    const double b = 2.0 * logx + 0.5 * p * std::log(logx) + std::log(1.5) - std::lgamma(0.5 * p);
    return {a, b};
}

double gumbel_quantile(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw validation_error("alpha must lie in (0, 1)");
    return -std::log(-std::log1p(-alpha) / 2.0);
}

double gumbel_cdf(double x) {
    return std::exp(-2.0 * std::exp(-x));
}

ThresholdResult threshold_sublinear(double horizon, double bandwidth, int dim, double alpha) {
    if (!(horizon > 0.0) || !(bandwidth > 0.0))
        throw validation_error("horizon and bandwidth must be positive");
    const double x = horizon / bandwidth;
    const auto [a, b] = gumbel_constants(x, dim);
    const double g = gumbel_quantile(alpha);
    const double root = (b + g) / a;
    if (!(root > 0.0))
        throw numeric_error("sublinear threshold came out non-positive; alpha too large for "
                            "this design");
    ThresholdResult result;
    result.beta = root * root;
    result.mode = "gumbel";
    result.horizon = horizon;
    result.bandwidth = bandwidth;
    result.dim = dim;
    result.alpha = alpha;
    return result;
}

ThresholdResult threshold_linear_mc(double gamma, int dim, double alpha, int n_mc,
                                    int grid_points_per_unit, std::uint64_t seed,
                                    unsigned threads) {
    if (!(gamma > 0.0 && gamma < 0.5))
        throw validation_error("gamma must lie in (0, 1/2)");
    if (dim < 1)
        throw validation_error("dimension must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw validation_error("alpha must lie in (0, 1)");
    if (n_mc < 100)
        throw validation_error("linear-MC threshold needs n_mc >= 100");
    if (grid_points_per_unit < 10)
        throw validation_error("grid resolution too coarse");

    const int G = grid_points_per_unit;
    const auto lag = static_cast<Eigen::Index>(std::llround(gamma * G));
    if (lag < 1 || 2 * lag >= G)
        throw validation_error("gamma does not resolve on the requested grid");
    const double gamma_eff = static_cast<double>(lag) / static_cast<double>(G);
    const double step_sd = std::sqrt(1.0 / static_cast<double>(G));

    std::vector<double> sups(static_cast<std::size_t>(n_mc));
    parallel_for(static_cast<std::size_t>(n_mc), threads, [&](std::size_t r) {
        std::mt19937_64 rng(derive_seed(seed, r));
        std::normal_distribution<double> normal(0.0, step_sd);
        Matrix path(dim, G + 1);
        path.col(0).setZero();
        for (Eigen::Index k = 1; k <= G; ++k)
            for (int i = 0; i < dim; ++i)
                path(i, k) = path(i, k - 1) + normal(rng);
        double sup = 0.0;
        for (Eigen::Index k = lag; k + lag <= G; ++k) {
            const double q =
                (path.col(k + lag) - 2.0 * path.col(k) + path.col(k - lag)).squaredNorm();
            sup = std::max(sup, q);
        }
        sups[r] = sup / (2.0 * gamma_eff);
    });
    std::sort(sups.begin(), sups.end());

    ThresholdResult result;
    result.beta = sorted_quantile(sups, 1.0 - alpha);
    result.mode = "linear_mc";
    result.dim = dim;
    result.alpha = alpha;
    result.gamma = gamma_eff;
    result.n_mc = n_mc;
    result.grid_points_per_unit = G;
    result.seed = seed;
    return result;
}

} // namespace mosum
