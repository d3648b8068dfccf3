#include "mosum/model.hpp"

#include <doctest.h>

#include <random>

using namespace mosum;

TEST_CASE("counting path of an empty process is zero") {
    EventSeries events({{}}, 10.0);
    const SampledPath path = counting_path(events, 1.0);
    CHECK(path.grid_points() == 11);
    CHECK(path.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("counting path counts events per right-closed interval") {
    EventSeries events({{0.5, 2.5, 2.7}}, 4.0);
    const SampledPath path = counting_path(events, 1.0);
    const std::vector<double> expected = {0, 1, 1, 3, 3};
    REQUIRE(path.grid_points() == 5);
    for (Eigen::Index k = 0; k < 5; ++k)
        CHECK(path.values(0, k) == expected[static_cast<std::size_t>(k)]);
}

TEST_CASE("event exactly at a grid point counts toward that grid point") {
    EventSeries events({{2.0}}, 4.0);
    const SampledPath path = counting_path(events, 1.0);
    CHECK(path.values(0, 1) == 0.0);
    CHECK(path.values(0, 2) == 1.0);
    CHECK(path.values(0, 3) == 1.0);
}

TEST_CASE("counting path validates inputs") {
    CHECK_THROWS_AS(EventSeries({{2.0, 1.0}}, 4.0), validation_error);
    CHECK_THROWS_AS(EventSeries({{1.0, 1.0}}, 4.0), validation_error);   // duplicate
    CHECK_THROWS_AS(EventSeries({{5.0}}, 4.0), validation_error);        // beyond horizon
    CHECK_THROWS_AS(EventSeries({{0.0}}, 4.0), validation_error);        // not in (0, T]
    EventSeries ok({{1.0}}, 4.0);
    CHECK_THROWS_AS(counting_path(ok, -1.0), validation_error);
    CHECK_THROWS_AS(counting_path(ok, 0.3), validation_error); // does not divide T
}

TEST_CASE("grid increments reproduce interval counts exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(1e-9, 50.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> times;
        for (int i = 0; i < 200; ++i)
            times.push_back(unif(rng));
        std::sort(times.begin(), times.end());
        times.erase(std::unique(times.begin(), times.end()), times.end());
        EventSeries events({times}, 50.0);
        const SampledPath path = counting_path(events, 1.0);
        for (Eigen::Index a = 0; a < path.grid_points(); a += 7) {
            for (Eigen::Index b = a + 1; b < path.grid_points(); b += 11) {
                const double lo = path.time_at(a);
                const double hi = path.time_at(b);
                long direct = 0;
                for (double t : times)
                    direct += (t > lo && t <= hi) ? 1 : 0;
                CHECK(path.values(0, b) - path.values(0, a) == static_cast<double>(direct));
            }
        }
    }
}

TEST_CASE("from_unsorted sorts and matches the sorted construction") {
    std::vector<double> shuffled = {3.5, 1.0, 2.25, 0.75};
    auto sorted = shuffled;
    std::sort(sorted.begin(), sorted.end());
    const auto a = EventSeries::from_unsorted({shuffled}, 4.0);
    const EventSeries b({sorted}, 4.0);
    const SampledPath pa = counting_path(a, 0.5);
    const SampledPath pb = counting_path(b, 0.5);
    CHECK(pa.values == pb.values);
}

TEST_CASE("config validation separates hard errors from warnings") {
    SegmentationConfig config;
    config.bandwidth_h = 120.0;
    config.eta = 0.75;
    config.alpha = 0.05;

    auto report = validate_config(config, 1600.0, 3);
    CHECK(report.ok());
    CHECK(report.errors.empty());

    config.bandwidth_h = 900.0; // 2h >= T
    report = validate_config(config, 1600.0, 3);
    CHECK_FALSE(report.ok());

    config.bandwidth_h = 120.0;
    config.eta = 0.0;
    report = validate_config(config, 1600.0, 3);
    CHECK_FALSE(report.ok());

    config.eta = 0.75;
    config.bandwidth_h = 125.5; // not grid aligned
    report = validate_config(config, 1600.0, 3);
    CHECK_FALSE(report.ok());

    // T/h close to 1: structural fine (2h < T) but Gumbel regime broken.
    config.bandwidth_h = 700.0;
    report = validate_config(config, 1600.0, 3);
    CHECK(report.ok());
    CHECK_FALSE(report.warnings.empty());
}

TEST_CASE("change spec segment lookup uses left-open segments") {
    const Vector d1 = Vector::Constant(1, 1.0);
    const Vector d2 = Vector::Constant(1, 2.0);
    const Matrix s = Matrix::Identity(1, 1);
    ChangeSpec spec(10.0, {4.0}, {1, 2}, {d1, d2}, {s, s});
    CHECK(spec.segment_index(4.0) == 0);    // t in (0, c_1]
    CHECK(spec.segment_index(4.0001) == 1); // t in (c_1, T]
    CHECK(spec.drift_change(0)[0] == doctest::Approx(1.0));
}

TEST_CASE("change spec rejects a vanishing drift change") {
    const Vector d = Vector::Constant(1, 1.0);
    const Matrix s = Matrix::Identity(1, 1);
    CHECK_THROWS_AS(ChangeSpec(10.0, {4.0}, {1, 1}, {d}, {s}), validation_error);
}
