#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mosum {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when inputs violate a documented precondition or invariant.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numeric routine cannot proceed (non-SPD scale matrix,
/// Monte Carlo horizon too small, ...).
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for replicate `index` of a run seeded with `base`. Replicates get
/// decorrelated streams regardless of how they are scheduled.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base ^ splitmix64(index + 1));
}

/// Linear-interpolation sample quantile on a sorted range (R type 7).
double sorted_quantile(const std::vector<double>& sorted, double level);

/// Runs fn(i) for i in [0, n). Results must be written to per-index slots so
/// the outcome is identical for any thread count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

inline unsigned default_threads() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

} // namespace mosum
