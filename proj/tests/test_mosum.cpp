#include "mosum/mosum.hpp"
#include "mosum/simulate.hpp"

#include <doctest.h>

#include <random>

using namespace mosum;

namespace {

SampledPath make_path(const std::vector<double>& values, double grid_step = 1.0) {
    SampledPath path;
    path.grid_step = grid_step;
    path.horizon = grid_step * static_cast<double>(values.size() - 1);
    path.values.resize(1, static_cast<Eigen::Index>(values.size()));
    for (std::size_t k = 0; k < values.size(); ++k)
        path.values(0, static_cast<Eigen::Index>(k)) = values[k];
    return path;
}

class FixedScale final : public ScaleProvider {
public:
    explicit FixedScale(Matrix m) : m_(std::move(m)) {}
    int dim() const override { return static_cast<int>(m_.rows()); }
    bool diagonal() const override { return false; }
    Matrix matrix_at(double) const override { return m_; }
    ScaleMode mode() const override { return ScaleMode::TrueFull; }
    std::string provenance() const override { return "oracle"; }

private:
    Matrix m_;
};

class FixedDiagonal final : public ScaleProvider {
public:
    explicit FixedDiagonal(Vector d) : d_(std::move(d)) {}
    int dim() const override { return static_cast<int>(d_.size()); }
    bool diagonal() const override { return true; }
    Vector diagonal_at(double) const override { return d_; }
    Matrix matrix_at(double) const override { return Matrix(d_.asDiagonal()); }
    ScaleMode mode() const override { return ScaleMode::TrueDiagonal; }
    std::string provenance() const override { return "oracle"; }

private:
    Vector d_;
};

ChangeSpec random_assumption2_spec(std::mt19937_64& rng, double bandwidth, double horizon,
                                   int dim, int changes) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> cps;
    // Spacing of at least 2h + 2 grid units between consecutive changes and
    // the boundary keeps Assumption 2 strict.
    const double slack = horizon - (changes + 1) * (2.0 * bandwidth + 2.0);
    REQUIRE(slack > 0.0);
    double t = 0.0;
    for (int i = 0; i < changes; ++i) {
        t += 2.0 * bandwidth + 2.0 + std::floor(unif(rng) * slack / changes);
        cps.push_back(t);
    }
    std::vector<int> labels(static_cast<std::size_t>(changes) + 1);
    std::vector<Vector> drifts;
    std::vector<Matrix> covs;
    for (int s = 0; s <= changes; ++s) {
        labels[static_cast<std::size_t>(s)] = s + 1;
        Vector mu(dim);
        for (int j = 0; j < dim; ++j)
            mu[j] = -2.0 + 4.0 * unif(rng);
        drifts.push_back(mu);
        covs.push_back(Matrix::Identity(dim, dim));
    }
    return ChangeSpec(horizon, cps, labels, drifts, covs);
}

} // namespace

TEST_CASE("pure linear drift has zero MOSUM statistic") {
    std::vector<double> values(41);
    for (std::size_t k = 0; k < values.size(); ++k)
        values[k] = 3.25 * static_cast<double>(k);
    const auto series = mosum_statistic(make_path(values), 5.0);
    CHECK(series.vectors.cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("hand-checked kink: M at the change equals sqrt(h/2) d") {
    // Z_t = 0 for t <= 3, Z_t = t - 3 beyond; h = 2.
    std::vector<double> values = {0, 0, 0, 0, 1, 2, 3, 4};
    const auto series = mosum_statistic(make_path(values), 2.0);
    // t = 3 is grid index 3, series index 3 - 2 = 1.
    CHECK(series.time_at(1) == doctest::Approx(3.0));
    CHECK(series.vectors(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("MOSUM equals the directly summed increment difference") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> step(0, 3);
    std::uniform_int_distribution<int> len(20, 50);
    std::uniform_int_distribution<int> band(2, 5);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = len(rng);
        std::vector<double> values(static_cast<std::size_t>(n));
        values[0] = 0.0;
        for (int k = 1; k < n; ++k)
            values[static_cast<std::size_t>(k)] =
                values[static_cast<std::size_t>(k - 1)] + step(rng);
        const int h = std::min(band(rng), (n - 1) / 2 - 1);
        if (h < 1)
            continue;
        const auto series = mosum_statistic(make_path(values), static_cast<double>(h));
        for (Eigen::Index j = 0; j < series.size(); ++j) {
            const auto k = static_cast<std::size_t>(series.first_grid_index + j);
            const double right = values[k + static_cast<std::size_t>(h)] - values[k];
            const double left = values[k] - values[k - static_cast<std::size_t>(h)];
            const double direct = (right - left) / std::sqrt(2.0 * h);
            CHECK(series.vectors(0, j) == doctest::Approx(direct).epsilon(1e-15));
        }
    }
}

TEST_CASE("MOSUM requires grid-aligned bandwidth and 2h < T") {
    std::vector<double> values(21, 0.0);
    CHECK_THROWS_AS(mosum_statistic(make_path(values), 2.5), validation_error);
    CHECK_THROWS_AS(mosum_statistic(make_path(values), 10.0), validation_error);
}

TEST_CASE("signal term: zero away from changes, peak sqrt(h/2) d, zero at tent feet") {
    // Simulation-study design point: 3 components, drift change at 250 from
    // mu 1.3 to 0.9.
    const int p = 3;
    std::vector<Vector> drifts;
    std::vector<Matrix> covs;
    for (double mu : {1.3, 0.9, 0.6, 0.8, 1.3}) {
        drifts.push_back(Vector::Constant(p, 1.0 / mu));
        covs.push_back(Matrix::Identity(p, p));
    }
    ChangeSpec spec(1600.0, {250.0, 500.0, 900.0, 1150.0}, {1, 2, 3, 4, 5}, drifts, covs);
    const double h = 120.0;

    CHECK(signal_term(spec, h, 700.0).norm() == 0.0);       // > h from all changes
    CHECK(signal_term(spec, h, 250.0 + h).norm() == 0.0);   // tent foot
    CHECK(signal_term(spec, h, 250.0 - h).norm() == 0.0);
    // Peak norm frozen from sqrt(60) * (1/0.9 - 1/1.3) * sqrt(3).
    CHECK(signal_term(spec, h, 250.0).norm() == doctest::Approx(4.58679).epsilon(1e-4));
    const Vector expected = std::sqrt(h / 2.0) * spec.drift_change(0);
    CHECK((signal_term(spec, h, 250.0) - expected).norm() < 1e-12);
}

TEST_CASE("noiseless path: MOSUM equals the signal term everywhere") {
    std::mt19937_64 rng(1234);
    for (int rep = 0; rep < 20; ++rep) {
        const double h = 8.0;
        const auto spec = random_assumption2_spec(rng, h, 200.0, 2, 3);
        const SampledPath path = noiseless_path(spec, 1.0);
        const auto series = mosum_statistic(path, h);
        for (Eigen::Index j = 0; j < series.size(); ++j) {
            const Vector expected = signal_term(spec, h, series.time_at(j));
            CHECK((series.vectors.col(j) - expected).norm() < 1e-9);
        }
    }
}

TEST_CASE("MOSUM is linear in the path") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> step(-2, 3);
    const int n = 41;
    SampledPath z1 = make_path(std::vector<double>(n, 0.0));
    SampledPath z2 = make_path(std::vector<double>(n, 0.0));
    for (int k = 1; k < n; ++k) {
        z1.values(0, k) = z1.values(0, k - 1) + step(rng);
        z2.values(0, k) = z2.values(0, k - 1) + step(rng);
    }
    SampledPath combo = z1;
    combo.values = 2.0 * z1.values - 3.0 * z2.values;
    const auto m1 = mosum_statistic(z1, 4.0);
    const auto m2 = mosum_statistic(z2, 4.0);
    const auto mc = mosum_statistic(combo, 4.0);
    // Linear to machine precision; the two evaluation orders round once each.
    CHECK((mc.vectors - (2.0 * m1.vectors - 3.0 * m2.vectors)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("quadratic form: identity, diagonal and solve oracle") {
    std::vector<double> values = {0, 0, 1, 3, 3, 4, 6, 6, 7};
    auto series = mosum_statistic(make_path(values), 2.0);

    quadratic_form_series(series, FixedDiagonal(Vector::Ones(1)));
    for (Eigen::Index j = 0; j < series.size(); ++j)
        CHECK(series.quadform[j] ==
              doctest::Approx(series.norms[j] * series.norms[j]).epsilon(1e-12));

    // Diagonal case: M = (1,0,0), A = diag(0.25, 1, 1) -> quadform 4.
    SampledPath path3;
    path3.grid_step = 1.0;
    path3.horizon = 8.0;
    path3.values.setZero(3, 9);
    // Unit kink at t = 4: with h = 2 the peak is sqrt(h/2) * 1 = 1.
    for (Eigen::Index k = 0; k < 9; ++k)
        path3.values(0, k) = (k >= 4) ? static_cast<double>(k - 4) : 0.0;
    auto series3 = mosum_statistic(path3, 2.0);
    Vector diag(3);
    diag << 0.25, 1.0, 1.0;
    quadratic_form_series(series3, FixedDiagonal(diag));
    // At t = 4 (series index 2) the vector is (1, 0, 0) by construction.
    CHECK(series3.vectors(0, 2) == doctest::Approx(1.0));
    CHECK(series3.quadform[2] == doctest::Approx(4.0));

    // Random SPD, compared against an independent full-pivot LU solve.
    std::mt19937_64 rng(42);
    std::normal_distribution<double> normal;
    for (int rep = 0; rep < 25; ++rep) {
        Matrix b(3, 3);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                b(r, c) = normal(rng);
        const Matrix spd = b * b.transpose() + 0.1 * Matrix::Identity(3, 3);
        SampledPath rp;
        rp.grid_step = 1.0;
        rp.horizon = 6.0;
        rp.values.setZero(3, 7);
        for (Eigen::Index k = 1; k < 7; ++k)
            for (int i = 0; i < 3; ++i)
                rp.values(i, k) = rp.values(i, k - 1) + normal(rng);
        auto rs = mosum_statistic(rp, 2.0);
        quadratic_form_series(rs, FixedScale(spd));
        for (Eigen::Index j = 0; j < rs.size(); ++j) {
            const Vector m = rs.vectors.col(j);
            const double oracle = m.dot(spd.fullPivLu().solve(m));
            CHECK(rs.quadform[j] == doctest::Approx(oracle).epsilon(1e-10));
        }
    }
}

TEST_CASE("quadratic form is rotation invariant") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> normal;
    Matrix b(3, 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            b(r, c) = normal(rng);
    const Matrix spd = b * b.transpose() + 0.5 * Matrix::Identity(3, 3);
    const Eigen::HouseholderQR<Matrix> qr(b);
    const Matrix q = qr.householderQ();

    SampledPath path;
    path.grid_step = 1.0;
    path.horizon = 10.0;
    path.values.setZero(3, 11);
    for (Eigen::Index k = 1; k < 11; ++k)
        for (int i = 0; i < 3; ++i)
            path.values(i, k) = path.values(i, k - 1) + normal(rng);

    auto base = mosum_statistic(path, 3.0);
    quadratic_form_series(base, FixedScale(spd));

    SampledPath rotated = path;
    rotated.values = q * path.values;
    auto rot = mosum_statistic(rotated, 3.0);
    quadratic_form_series(rot, FixedScale(q * spd * q.transpose()));

    for (Eigen::Index j = 0; j < base.size(); ++j)
        CHECK(rot.quadform[j] == doctest::Approx(base.quadform[j]).epsilon(1e-9));
}

TEST_CASE("non positive definite scale names the offending time") {
    std::vector<double> values = {0, 0, 1, 3, 3, 4, 6, 6, 7};
    auto series = mosum_statistic(make_path(values), 2.0);
    Matrix bad = Matrix::Identity(1, 1);
    bad(0, 0) = -1.0;
    CHECK_THROWS_WITH_AS(quadratic_form_series(series, FixedScale(bad)),
                         doctest::Contains("t = 2"), numeric_error);
}
