#include "mosum/simulate.hpp"

#include "mosum/detector.hpp"
#include "mosum/mosum.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mosum;

TEST_CASE("single-segment exponential stream has Poisson-scale event counts") {
    RenewalScenario scenario;
    scenario.name = "one";
    scenario.horizon = 1000.0;
    scenario.dim = 1;
    scenario.segments = {{InterEventParams{1.0, 1.0}}};

    int outliers = 0;
    const int reps = 60;
    for (int r = 0; r < reps; ++r) {
        const auto events = simulate_renewal_regimes(scenario, derive_seed(1, r));
        const double count = static_cast<double>(events.components[0].size());
        if (std::abs(count - 1000.0) > 4.0 * std::sqrt(1000.0))
            ++outliers;
    }
    CHECK(outliers == 0);
}

TEST_CASE("seed determinism of the renewal simulator") {
    const auto scenario = scenario_preset("constvar-dependent");
    const auto a = simulate_renewal_regimes(scenario, 99);
    const auto b = simulate_renewal_regimes(scenario, 99);
    const auto c = simulate_renewal_regimes(scenario, 100);
    CHECK(a.components == b.components);
    CHECK(a.components != c.components);
}

TEST_CASE("dependent draws hit the target pairwise correlation") {
    // Inter-event vectors from a long single-segment dependent scenario.
    RenewalScenario scenario;
    scenario.name = "dep";
    scenario.horizon = 150000.0;
    scenario.dim = 3;
    scenario.segments = {std::vector<InterEventParams>(3, {1.3, 0.7})};
    scenario.dependence.kind = Dependence::Kind::SharedComponent;
    scenario.dependence.corr = 0.2;

    const auto events = simulate_renewal_regimes(scenario, 12345);
    const std::size_t n = std::min({events.components[0].size(), events.components[1].size(),
                                    events.components[2].size()});
    REQUIRE(n > 100000); // ~1e5 inter-event draws
    auto iet = [&](int comp, std::size_t k) {
        const auto& ev = events.components[static_cast<std::size_t>(comp)];
        return k == 0 ? ev[0] : ev[k] - ev[k - 1];
    };
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
            for (std::size_t k = 0; k < n; ++k) {
                const double x = iet(a, k);
                const double y = iet(b, k);
                sa += x; sb += y; saa += x * x; sbb += y * y; sab += x * y;
            }
            const double nn = static_cast<double>(n);
            const double cov = sab / nn - (sa / nn) * (sb / nn);
            const double va = saa / nn - (sa / nn) * (sa / nn);
            const double vb = sbb / nn - (sb / nn) * (sb / nn);
            CHECK(cov / std::sqrt(va * vb) == doctest::Approx(0.2).epsilon(0.1));
        }
    }
    // Marginal moments survive the shared-component construction.
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sum += iet(0, k);
        sumsq += iet(0, k) * iet(0, k);
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sumsq / static_cast<double>(n) - mean * mean;
    CHECK(mean == doctest::Approx(1.3).epsilon(0.01));
    CHECK(std::sqrt(var) == doctest::Approx(0.7).epsilon(0.02));
}

TEST_CASE("poisson preset uses unit-shape gammas") {
    const auto scenario = scenario_preset("poisson-independent");
    for (const auto& seg : scenario.segments)
        for (const auto& par : seg)
            CHECK(par.shape() == doctest::Approx(1.0));
}

TEST_CASE("partial-sum simulator matches segment drift and covariance") {
    const int p = 2;
    Matrix sigma(p, p);
    sigma << 1.0, 0.4, 0.4, 0.8;
    ChangeSpec spec(200000.0, {100000.0}, {1, 2},
                    {Vector::Constant(p, 0.5), Vector::Constant(p, 1.5)}, {sigma, sigma});
    const auto path = simulate_partial_sum_regimes(spec, {InnovationKind::Gaussian}, 4242);

    // Segment means: average increment over each stretch.
    const Eigen::Index n1 = 100000;
    const Vector mean1 = (path.values.col(n1) - path.values.col(0)) / static_cast<double>(n1);
    const Vector mean2 =
        (path.values.col(200000) - path.values.col(n1)) / static_cast<double>(100000);
    for (int j = 0; j < p; ++j) {
        CHECK(mean1[j] == doctest::Approx(0.5).epsilon(0.05));
        CHECK(mean2[j] == doctest::Approx(1.5).epsilon(0.02));
    }

    // Sample covariance of first-segment increments approaches sigma.
    Matrix acc = Matrix::Zero(p, p);
    Vector mu = Vector::Zero(p);
    for (Eigen::Index k = 1; k <= n1; ++k)
        mu += path.values.col(k) - path.values.col(k - 1);
    mu /= static_cast<double>(n1);
    for (Eigen::Index k = 1; k <= n1; ++k) {
        const Vector inc = path.values.col(k) - path.values.col(k - 1) - mu;
        acc += inc * inc.transpose();
    }
    acc /= static_cast<double>(n1 - 1);
    CHECK((acc - sigma).norm() / sigma.norm() < 0.10);
}

TEST_CASE("student-t innovations are standardized") {
    const int p = 1;
    ChangeSpec spec(150000.0, {}, {1}, {Vector::Zero(p)}, {Matrix::Identity(p, p)});
    const auto path = simulate_partial_sum_regimes(spec, {InnovationKind::StudentT, 5.0}, 7);
    double sumsq = 0.0;
    for (Eigen::Index k = 1; k < path.grid_points(); ++k) {
        const double inc = path.values(0, k) - path.values(0, k - 1);
        sumsq += inc * inc;
    }
    CHECK(sumsq / static_cast<double>(path.grid_points() - 1) ==
          doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("wiener simulator: exact drift path when noiseless, QV and independence") {
    const int p = 2;
    SUBCASE("noiseless helper returns the exact integrated drift") {
        ChangeSpec spec(100.0, {40.0}, {1, 2},
                        {Vector::Constant(p, 1.0), Vector::Constant(p, -0.5)},
                        {Matrix::Identity(p, p), Matrix::Identity(p, p)});
        const auto path = noiseless_path(spec, 0.5);
        CHECK(path.values(0, 40) == doctest::Approx(20.0).epsilon(1e-12)); // t = 20
        CHECK(path.values(0, 80) == doctest::Approx(40.0).epsilon(1e-12)); // t = 40, kink
        CHECK(path.values(1, 120) == doctest::Approx(40.0 - 0.5 * 20.0).epsilon(1e-12));
        CHECK(path.values(0, 0) == 0.0);
    }
    SUBCASE("quadratic variation per unit time approximates trace(sigma)") {
        Matrix sigma(p, p);
        sigma << 1.0, 0.3, 0.3, 0.5;
        ChangeSpec spec(100.0, {}, {1}, {Vector::Zero(p)}, {sigma});
        const auto path = simulate_wiener_drift(spec, 0.01, 99);
        double qv = 0.0;
        for (Eigen::Index k = 1; k < path.grid_points(); ++k)
            qv += (path.values.col(k) - path.values.col(k - 1)).squaredNorm();
        CHECK(qv / 100.0 == doctest::Approx(sigma.trace()).epsilon(0.05));
    }
    SUBCASE("increments over disjoint intervals are uncorrelated") {
        ChangeSpec spec(100000.0, {}, {1}, {Vector::Zero(1)}, {Matrix::Identity(1, 1)});
        const auto path = simulate_wiener_drift(spec, 1.0, 321);
        double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
        const Eigen::Index pairs = path.grid_points() / 2 - 1;
        for (Eigen::Index k = 0; k < pairs; ++k) {
            const double x = path.values(0, 2 * k + 1) - path.values(0, 2 * k);
            const double y = path.values(0, 2 * k + 2) - path.values(0, 2 * k + 1);
            sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
        }
        const double nn = static_cast<double>(pairs);
        const double corr = (sxy / nn - sx / nn * sy / nn) /
                            std::sqrt((sxx / nn - sx / nn * sx / nn) *
                                      (syy / nn - sy / nn * sy / nn));
        CHECK(std::abs(corr) < 0.05);
    }
}

TEST_CASE("regime switch resets the renewal clock at the change point") {
    // A regime with huge inter-event times followed by a fast regime: events
    // appear shortly after the change only if the clock restarts there.
    RenewalScenario scenario;
    scenario.name = "reset";
    scenario.horizon = 200.0;
    scenario.dim = 1;
    scenario.change_points = {100.0};
    scenario.segments = {{InterEventParams{1000.0, 1.0}}, {InterEventParams{0.5, 0.05}}};

    const auto events = simulate_renewal_regimes(scenario, 8);
    const auto& comp = events.components[0];
    REQUIRE(!comp.empty());
    const double first_after = *std::lower_bound(comp.begin(), comp.end(), 100.0);
    CHECK(first_after > 100.0);
    CHECK(first_after < 102.0); // fresh draw from the fast regime, not leftover
}

TEST_CASE("null renewal sup quadform grows sub-polynomially at fixed T/h") {
    // T/h held at 40, so log(T/h) is constant and the sup should not grow
    // with T by the noise-magnitude theorem.
    std::vector<double> horizons = {2000.0, 8000.0, 32000.0};
    std::vector<double> mean_sups;
    for (double T : horizons) {
        RenewalScenario scenario;
        scenario.name = "null";
        scenario.horizon = T;
        scenario.dim = 3;
        scenario.segments = {std::vector<InterEventParams>(3, {1.0, 1.0})};
        const auto spec = scenario.to_change_spec();
        SegmentationConfig config;
        config.bandwidth_h = T / 40.0;
        config.scale_mode = ScaleMode::TrueDiagonal;

        double sum = 0.0;
        const int reps = 6;
        for (int r = 0; r < reps; ++r) {
            const auto events =
                simulate_renewal_regimes(scenario, derive_seed(321 + static_cast<int>(T), r));
            const auto path = counting_path(events, 1.0);
            MosumSeries series = mosum_statistic(path, config.bandwidth_h);
            const auto scale = build_scale_provider(ScaleMode::TrueDiagonal, &events, &spec,
                                                    config, T, 3);
            quadratic_form_series(series, *scale);
            sum += series.quadform.maxCoeff();
        }
        mean_sups.push_back(sum / 6.0);
    }
    // Regression of log(sup) on log(T): slope well below any polynomial rate.
    const double slope = (std::log(mean_sups.back()) - std::log(mean_sups.front())) /
                         (std::log(horizons.back()) - std::log(horizons.front()));
    CHECK(std::abs(slope) < 0.25);
}
