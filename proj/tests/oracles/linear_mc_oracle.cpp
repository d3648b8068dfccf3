// One-shot generator for the linear-bandwidth threshold oracle recorded in
// fixtures/linear_mc_oracle.md. Simulates the functional limit
//   sup_{gamma<=s<=1-gamma} (1/2gamma) |B_{s+gamma} - 2B_s + B_{s-gamma}|^2
// directly from cumulative sums of Gaussian steps, independently of the
// production implementation (different RNG stream layout, different sweep).
//
// Build standalone:  g++ -O2 -std=c++20 linear_mc_oracle.cpp -o oracle

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

int main(int argc, char** argv) {
    const int n_mc = argc > 1 ? std::atoi(argv[1]) : 100000;
    const int grid = argc > 2 ? std::atoi(argv[2]) : 10000;
    const double gamma = 0.25;
    const double alpha = 0.05;

    std::mt19937_64 rng(987654321u);
    std::normal_distribution<double> normal(0.0, std::sqrt(1.0 / grid));

    const int lag = static_cast<int>(gamma * grid);
    std::vector<double> cumulative(static_cast<std::size_t>(grid) + 1, 0.0);
    std::vector<double> sups;
    sups.reserve(static_cast<std::size_t>(n_mc));
    for (int r = 0; r < n_mc; ++r) {
        for (int k = 1; k <= grid; ++k)
            cumulative[k] = cumulative[k - 1] + normal(rng);
        double sup = 0.0;
        for (int k = lag; k <= grid - lag; ++k) {
            const double d = cumulative[k + lag] - 2.0 * cumulative[k] + cumulative[k - lag];
            sup = std::max(sup, d * d);
        }
        sups.push_back(sup / (2.0 * gamma));
    }
    std::sort(sups.begin(), sups.end());
    const double pos = (1.0 - alpha) * (n_mc - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const double q = sups[lo] + (pos - lo) * (sups[lo + 1] - sups[lo]);
    std::printf("n_mc=%d grid=%d gamma=%.2f alpha=%.2f quantile=%.6f\n", n_mc, grid, gamma,
                alpha, q);
    return 0;
}
