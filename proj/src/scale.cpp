#include "mosum/scale.hpp"

#include <cmath>
#include <sstream>

namespace mosum {

Vector ScaleProvider::diagonal_at(double t) const {
    return matrix_at(t).diagonal();
}

namespace {

struct SideMoments {
    long count = 0;
    double mean = 0.0;
    double variance = 0.0; // unbiased
    bool usable() const { return count >= 2; }
    double estimate() const { return variance / (mean * mean * mean); }
};

// Prefix sums over the inter-event times of one component.
struct InterEventPrefix {
    const std::vector<double>* events = nullptr;
    std::vector<double> sum;   // sum[k] = w_0 + ... + w_{k-1}
    std::vector<double> sumsq;

    explicit InterEventPrefix(const std::vector<double>& ev) : events(&ev) {
        const std::size_t n = ev.size();
        const std::size_t m = n >= 2 ? n - 1 : 0;
        sum.assign(m + 1, 0.0);
        sumsq.assign(m + 1, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const double w = ev[i + 1] - ev[i];
            sum[i + 1] = sum[i] + w;
            sumsq[i + 1] = sumsq[i] + w * w;
        }
    }

    // Moments of the inter-event times fully contained in (lo, hi].
    SideMoments window(double lo, double hi) const {
        SideMoments out;
        const auto& ev = *events;
        if (ev.size() < 2)
            return out;
        const auto first =
            std::upper_bound(ev.begin(), ev.end(), lo) - ev.begin(); // first event > lo
        const auto last =
            std::upper_bound(ev.begin(), ev.end(), hi) - ev.begin(); // events <= hi
        // Usable intervals are [first, last - 2] in inter-event indexing.
        const auto count = last - 1 - first;
        if (count < 1)
            return out;
        const auto a = static_cast<std::size_t>(first);
        const auto b = static_cast<std::size_t>(last - 1);
        out.count = count;
        const double s = sum[b] - sum[a];
        const double s2 = sumsq[b] - sumsq[a];
        out.mean = s / static_cast<double>(count);
        if (count >= 2) {
            const double num = s2 - static_cast<double>(count) * out.mean * out.mean;
            out.variance = std::max(0.0, num / static_cast<double>(count - 1));
        }
        return out;
    }

    SideMoments global() const {
        if (events->size() < 2)
            return {};
        return window(0.0, events->back());
    }
};

} // namespace

LocalVarianceEstimate local_renewal_variance(const std::vector<double>& events, double t,
                                             double bandwidth, double floor) {
    if (!(bandwidth > 0.0))
        throw validation_error("bandwidth must be positive");
    if (!(floor > 0.0))
        throw validation_error("variance floor must be positive");
    InterEventPrefix prefix(events);
    const SideMoments left = prefix.window(t - bandwidth, t);
    const SideMoments right = prefix.window(t, t + bandwidth);

    LocalVarianceEstimate out;
    out.left_usable = left.usable();
    out.right_usable = right.usable();
    double value;
    if (left.usable() && right.usable()) {
        value = std::min(left.estimate(), right.estimate());
    } else if (left.usable()) {
        value = left.estimate();
    } else if (right.usable()) {
        value = right.estimate();
    } else {
        const SideMoments global = prefix.global();
        value = global.usable() ? global.estimate() : floor;
        out.used_global_fallback = true;
    }
    if (!std::isfinite(value))
        value = floor;
    out.value = std::max(value, floor);
    return out;
}

Matrix renewal_asymptotic_covariance(const Vector& mu, const Vector& sigma2,
                                     const std::optional<Matrix>& combination,
                                     const std::optional<Matrix>& sigma_iet) {
    if (mu.size() != sigma2.size())
        throw validation_error("mu and sigma2 must have equal length");
    for (Eigen::Index j = 0; j < mu.size(); ++j)
        if (!(mu[j] > 0.0))
            throw validation_error("inter-event means must be positive");

    if (sigma_iet) {
        if (sigma_iet->rows() != mu.size() || sigma_iet->cols() != mu.size())
            throw validation_error("inter-event covariance must be p x p");
        if (!sigma_iet->isApprox(sigma_iet->transpose(), 1e-12))
            throw validation_error("inter-event covariance is not symmetric");
        for (Eigen::Index j = 1; j < mu.size(); ++j)
            if (std::abs(mu[j] - mu[0]) > 1e-12 * std::max(1.0, mu[0]))
                throw validation_error("dependent inter-event times require equal means; the "
                                       "limit is not a multivariate Wiener process otherwise");
        return *sigma_iet / (mu[0] * mu[0] * mu[0]);
    }

    Vector diag(mu.size());
    for (Eigen::Index j = 0; j < mu.size(); ++j)
        diag[j] = sigma2[j] / (mu[j] * mu[j] * mu[j]);
    if (!combination)
        return diag.asDiagonal();
    const Matrix& B = *combination;
    if (B.cols() != mu.size())
        throw validation_error("combination matrix columns must match the stream count");
    return B * diag.asDiagonal() * B.transpose();
}

namespace {

class IdentityScale final : public ScaleProvider {
public:
    explicit IdentityScale(int p) : p_(p) {}
    int dim() const override { return p_; }
    bool diagonal() const override { return true; }
    Vector diagonal_at(double) const override { return Vector::Ones(p_); }
    Matrix matrix_at(double) const override { return Matrix::Identity(p_, p_); }
    ScaleMode mode() const override { return ScaleMode::Identity; }
    std::string provenance() const override { return "oracle"; }

private:
    int p_;
};

class TrueCovarianceScale final : public ScaleProvider {
public:
    TrueCovarianceScale(const ChangeSpec& spec, bool diagonal_only)
        : spec_(spec), diagonal_only_(diagonal_only) {}

    int dim() const override { return spec_.dim(); }
    bool diagonal() const override { return diagonal_only_; }
    Vector diagonal_at(double t) const override { return spec_.covariance_at(t).diagonal(); }
    Matrix matrix_at(double t) const override {
        if (diagonal_only_)
            return Matrix(spec_.covariance_at(t).diagonal().asDiagonal());
        return spec_.covariance_at(t);
    }
    ScaleMode mode() const override {
        return diagonal_only_ ? ScaleMode::TrueDiagonal : ScaleMode::TrueFull;
    }
    std::string provenance() const override { return "oracle"; }

private:
    ChangeSpec spec_;
    bool diagonal_only_;
};

class LocalDiagonalScale final : public ScaleProvider {
public:
    LocalDiagonalScale(const EventSeries& events, double bandwidth, double grid_step,
                       double floor)
        : grid_step_(grid_step), p_(events.dim()) {
        // Estimates exist for interior grid points t in [h, T - h]; queries
        // outside reuse the nearest interior value.
        first_index_ = grid_steps(bandwidth, grid_step, "bandwidth");
        const Eigen::Index n = grid_steps(events.horizon, grid_step, "horizon") + 1;
        const Eigen::Index m = n - 2 * first_index_;
        if (m <= 0)
            throw validation_error("horizon too short for local variance estimation");
        values_.resize(p_, m);
        fallbacks_ = 0;
        for (int j = 0; j < p_; ++j) {
            const auto& comp = events.components[static_cast<std::size_t>(j)];
            for (Eigen::Index k = 0; k < m; ++k) {
                const double t = static_cast<double>(first_index_ + k) * grid_step;
                const auto est = local_renewal_variance(comp, t, bandwidth, floor);
                values_(j, k) = est.value;
                if (!est.left_usable || !est.right_usable)
                    ++fallbacks_;
            }
        }
    }

    int dim() const override { return p_; }
    bool diagonal() const override { return true; }
    Vector diagonal_at(double t) const override { return values_.col(clamp_index(t)); }
    Matrix matrix_at(double t) const override {
        return Matrix(values_.col(clamp_index(t)).asDiagonal());
    }
    ScaleMode mode() const override { return ScaleMode::LocalDiagonalEstimate; }
    std::string provenance() const override { return "estimated"; }
    long fallback_count() const { return fallbacks_; }

private:
    Eigen::Index clamp_index(double t) const {
        const auto k = static_cast<Eigen::Index>(std::llround(t / grid_step_)) - first_index_;
        return std::clamp<Eigen::Index>(k, 0, values_.cols() - 1);
    }

    double grid_step_;
    int p_;
    Eigen::Index first_index_ = 0;
    Matrix values_;
    long fallbacks_ = 0;
};

} // namespace

std::unique_ptr<ScaleProvider> build_scale_provider(ScaleMode mode, const EventSeries* events,
                                                    const ChangeSpec* spec,
                                                    const SegmentationConfig& config,
                                                    double horizon, int dim) {
    switch (mode) {
    case ScaleMode::Identity:
        return std::make_unique<IdentityScale>(dim);
    case ScaleMode::TrueDiagonal:
    case ScaleMode::TrueFull:
        if (spec == nullptr)
            throw validation_error("scale mode " + to_string(mode) +
                                   " needs the oracle change spec");
        if (spec->dim() != dim)
            throw validation_error("oracle change spec dimension mismatch");
        return std::make_unique<TrueCovarianceScale>(*spec, mode == ScaleMode::TrueDiagonal);
    case ScaleMode::LocalDiagonalEstimate:
        if (events == nullptr)
            throw validation_error("scale mode local_diag needs the raw event series");
        if (events->dim() != dim || events->horizon != horizon)
            throw validation_error("event series does not match the path");
        return std::make_unique<LocalDiagonalScale>(*events, config.bandwidth_h,
                                                    config.grid_step, config.variance_floor);
    }
    throw validation_error("unknown scale mode");
}

} // namespace mosum
