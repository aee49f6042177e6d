#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vwergm/experiments.hpp"

using namespace vwergm;

TEST_CASE("run_sweep: exact gaps of the no-interaction chain") {
    SweepSpec spec{SweepKind::Gap, 0.5, 0.0, 0.0, {50, 100, 200}};
    const auto rows = run_sweep(spec);
    REQUIRE(rows.size() == 3);  // deterministic kind: one row per n
    CHECK(std::abs(rows[0].value - 0.02) <= 1e-8);
    CHECK(std::abs(rows[1].value - 0.01) <= 1e-8);
    CHECK(std::abs(rows[2].value - 0.005) <= 1e-8);
    for (const SweepRow& row : rows) CHECK_FALSE(row.censored);
}

TEST_CASE("run_sweep: coupling sweep hits the coupon-collector mean") {
    SweepSpec spec{SweepKind::Coupling, 0.5, 0.0, 0.0, {100}};
    spec.replicas = 200;
    spec.master_seed = 7;
    spec.cap = 1000000;
    const auto rows = run_sweep(spec);
    REQUIRE(rows.size() == 200);
    double sum = 0.0;
    for (const SweepRow& row : rows) {
        REQUIRE_FALSE(row.censored);
        sum += row.value;
    }
    double harmonic = 0.0;
    for (int k = 1; k <= 100; ++k) harmonic += 1.0 / k;
    const double expected = 100.0 * harmonic;
    CHECK(std::abs(sum / 200.0 - expected) <= 0.15 * expected);
}

TEST_CASE("run_sweep: determinism is independent of the thread count") {
    SweepSpec spec{SweepKind::BurnIn, 0.5, 0.5, 0.5, {100, 200, 300}};
    spec.replicas = 8;
    spec.master_seed = 99;
    spec.cap = 10000000;
    spec.burnin_start_c = 0.0;

    spec.threads = 1;
    const auto serial = run_sweep(spec);
    spec.threads = 4;
    const auto parallel = run_sweep(spec);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].n == parallel[i].n);
        CHECK(serial[i].replicate == parallel[i].replicate);
        CHECK(serial[i].value == parallel[i].value);  // bit identical
        CHECK(serial[i].censored == parallel[i].censored);
    }
}

TEST_CASE("run_sweep: censoring and cap monotonicity") {
    SweepSpec spec{SweepKind::Escape, 0.05, 6.0, 0.0, {30, 40}};
    spec.replicas = 10;
    spec.master_seed = 15;
    spec.cap = 50;  // far below typical escape times
    const auto capped = run_sweep(spec);
    int censored = 0;
    for (const SweepRow& row : capped) censored += row.censored;
    CHECK(censored > 0);

    spec.cap = 100000000;
    const auto uncapped = run_sweep(spec);
    // Raising the cap never changes rows that finished under the small cap.
    for (std::size_t i = 0; i < capped.size(); ++i) {
        if (!capped[i].censored) {
            CHECK(uncapped[i].value == capped[i].value);
            CHECK_FALSE(uncapped[i].censored);
        }
    }

    SweepSpec bad = spec;
    bad.n_values = {40, 30};
    CHECK_THROWS_AS(run_sweep(bad), std::invalid_argument);
    bad.n_values = {};
    CHECK_THROWS_AS(run_sweep(bad), std::invalid_argument);
}

TEST_CASE("fit_scaling: exact synthetic data") {
    const ScalingFit power =
        fit_scaling({{1.0, 1.0}, {2.0, 4.0}, {4.0, 16.0}}, FitModel::PowerLaw);
    CHECK(power.exponent_or_rate == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(power.coefficient == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(power.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<FitPoint> nlogn;
    for (double n : {10.0, 20.0, 40.0, 80.0}) nlogn.push_back({n, n * std::log(n)});
    const ScalingFit ratio = fit_scaling(nlogn, FitModel::NLogN);
    CHECK(ratio.coefficient == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ratio.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    const ScalingFit expo = fit_scaling(
        {{30.0, std::exp(3.0)}, {40.0, std::exp(4.0)}, {50.0, std::exp(5.0)}},
        FitModel::Exponential);
    CHECK(expo.exponent_or_rate == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(expo.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(fit_scaling({{1.0, 1.0}, {2.0, 2.0}}, FitModel::PowerLaw),
                    std::invalid_argument);
    const ScalingFit with_censored = fit_scaling(
        {{1.0, 1.0}, {2.0, 4.0}, {4.0, 16.0}, {8.0, 0.0, true}}, FitModel::PowerLaw);
    CHECK(with_censored.censored_warning);
    CHECK(with_censored.censored_excluded == 1);
    CHECK(with_censored.exponent_or_rate == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("aggregate_mean groups rows and flags censored majorities") {
    const std::vector<SweepRow> rows{{10, 0, 4.0, false}, {10, 1, 6.0, false},
                                     {20, 0, 9.0, false}, {20, 1, 100.0, true},
                                     {30, 0, 50.0, true}};
    const auto points = aggregate_mean(rows);
    REQUIRE(points.size() == 3);
    CHECK(points[0].n == 10.0);
    CHECK(points[0].y == doctest::Approx(5.0));
    CHECK_FALSE(points[0].censored);
    CHECK(points[1].y == doctest::Approx(9.0));  // censored row excluded from the mean
    CHECK_FALSE(points[1].censored);
    CHECK(points[2].censored);  // nothing usable at n = 30
}

TEST_CASE("phase_experiment refuses mismatched parameters") {
    PhaseExperimentConfig config;
    config.p = 0.05;
    config.alpha1 = 6.0;
    config.alpha2 = 0.0;
    CHECK_THROWS_AS(phase_experiment(Phase::HighTemperature, config), std::invalid_argument);
}

TEST_CASE("phase_experiment: reduced-size low-temperature run") {
    PhaseExperimentConfig config;
    config.n_values = {30, 40, 50, 60, 70, 80};
    const PhaseExperimentReport report = phase_experiment(Phase::LowTemperature, config);
    REQUIRE(report.inverse_gap_fit.has_value());
    REQUIRE(report.inverse_bottleneck_fit.has_value());
    CHECK(report.inverse_gap_fit->exponent_or_rate > 0.0);
    CHECK(report.inverse_gap_fit->r_squared >= 0.9);
    CHECK(report.inverse_bottleneck_fit->exponent_or_rate > 0.0);
    CHECK(report.inverse_bottleneck_fit->r_squared >= 0.9);
}

TEST_CASE("phase_experiment: reduced-size high-temperature run") {
    PhaseExperimentConfig config;
    config.n_values = {50, 100, 200};
    config.replicas = 30;
    const PhaseExperimentReport report = phase_experiment(Phase::HighTemperature, config);
    REQUIRE(report.mixing_fit.has_value());
    REQUIRE(report.coupling_fit.has_value());
    CHECK(report.mixing_ratio_spread < 2.0);
    CHECK(report.coupling_ratio_spread < 3.0);
}
