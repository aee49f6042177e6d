#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "vwergm/analysis.hpp"
#include "vwergm/rng.hpp"

using namespace vwergm;

namespace {

// Independent fixed-point oracle: sign scan of lambda(c) - c on a fine grid
// followed by bisection on each bracketed change.
std::vector<double> lambda_roots_by_scan(const ModelParams& params, int grid = 10000) {
    auto f = [&](double c) { return lambda(params, c) - c; };
    std::vector<double> roots;
    double prev_c = 1e-9, prev_f = f(prev_c);
    for (int g = 1; g <= grid; ++g) {
        const double c = g == grid ? 1.0 - 1e-9 : static_cast<double>(g) / grid;
        const double fc = f(c);
        if ((prev_f > 0.0 && fc <= 0.0) || (prev_f < 0.0 && fc >= 0.0)) {
            double lo = prev_c, hi = c, flo = prev_f;
            for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                if ((fm > 0.0) == (flo > 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_c = c;
        prev_f = fc;
    }
    return roots;
}

}  // namespace

TEST_CASE("find_fixed_points examples") {
    const auto trivial = find_fixed_points(ModelParams(1, 0.3, 0.0, 0.0));
    REQUIRE(trivial.size() == 1);
    CHECK(trivial[0].c == doctest::Approx(0.3).epsilon(1e-11));
    CHECK(trivial[0].lambda_prime == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(trivial[0].kind == FixedPointKind::Attractor);

    const auto high = find_fixed_points(ModelParams(1, 0.5, 0.5, 0.5));
    REQUIRE(high.size() == 1);
    CHECK(high[0].c == doctest::Approx(0.5954).epsilon(1e-3));
    CHECK(high[0].lambda_prime == doctest::Approx(0.192).epsilon(1e-2));

    const auto low = find_fixed_points(ModelParams(1, 0.05, 6.0, 0.0));
    REQUIRE(low.size() == 3);
    CHECK(low[0].c == doctest::Approx(0.078).epsilon(2e-2));
    CHECK(low[0].kind == FixedPointKind::Attractor);
    CHECK(low[1].c == doctest::Approx(0.47).epsilon(2e-2));
    CHECK(low[1].kind == FixedPointKind::Repellor);
    CHECK(low[2].c == doctest::Approx(0.935).epsilon(1e-2));
    CHECK(low[2].kind == FixedPointKind::Attractor);
}

TEST_CASE("fixed points solve lambda(c) = c to root tolerance") {
    Xoshiro256pp rng(21);
    for (int draw = 0; draw < 200; ++draw) {
        const ModelParams params(1, 0.02 + 0.96 * rng.uniform01(), 8.0 * rng.uniform01(),
                                 8.0 * rng.uniform01());
        for (const FixedPoint& fp : find_fixed_points(params))
            CHECK(std::abs(lambda(params, fp.c) - fp.c) <= 1e-12);
    }
}

TEST_CASE("lambda-scan oracle agrees with the phi-prime route") {
    Xoshiro256pp rng(22);
    for (int draw = 0; draw < 200; ++draw) {
        const ModelParams params(1, 0.02 + 0.96 * rng.uniform01(), 8.0 * rng.uniform01(),
                                 8.0 * rng.uniform01());
        const auto via_phi = find_fixed_points(params);
        const auto via_scan = lambda_roots_by_scan(params);
        REQUIRE(via_phi.size() == via_scan.size());
        REQUIRE(via_phi.size() <= 3);
        for (std::size_t i = 0; i < via_phi.size(); ++i)
            CHECK(std::abs(via_phi[i].c - via_scan[i]) <= 1e-9);
        // Lemma-4.3-style sign agreement at every root.
        for (const FixedPoint& fp : via_phi) {
            const double curvature = phi_derivative(params, fp.c, 2);
            const double slope_gap = fp.lambda_prime - 1.0;
            if (std::abs(curvature) > 1e-9 || std::abs(slope_gap) > 1e-9)
                CHECK(std::signbit(curvature) == std::signbit(slope_gap));
        }
    }
}

TEST_CASE("classify_phase examples") {
    CHECK(classify_phase(ModelParams(1, 0.5, 0.5, 0.5)).phase == Phase::HighTemperature);
    CHECK(classify_phase(ModelParams(1, 0.05, 6.0, 0.0)).phase == Phase::LowTemperature);
    const CriticalPoint cp = critical_point(0.5);
    CHECK(classify_phase(ModelParams(1, cp.p_c, cp.alpha1_c, cp.alpha2)).phase ==
          Phase::Degenerate);
}

TEST_CASE("critical_point closed forms") {
    const CriticalPoint half = critical_point(0.5);
    CHECK(half.p_c == doctest::Approx(1.0 / (1.0 + std::exp(2.0))).epsilon(1e-12));
    CHECK(half.alpha1_c == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(half.alpha2 == doctest::Approx(0.0).epsilon(1e-14));

    const CriticalPoint two_thirds = critical_point(2.0 / 3.0);
    const double expected_p = 2.0 * std::exp(-1.5) / (2.0 * std::exp(-1.5) + 1.0);
    CHECK(two_thirds.p_c == doctest::Approx(expected_p).epsilon(1e-12));
    CHECK(two_thirds.alpha1_c == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(two_thirds.alpha2 == doctest::Approx(27.0 / 4.0).epsilon(1e-12));

    const CriticalPoint mid = critical_point(0.55);
    CHECK(mid.p_c == doctest::Approx(0.14493).epsilon(1e-3));
    CHECK(mid.alpha1_c == doctest::Approx(3.14254).epsilon(1e-5));
    CHECK(mid.alpha2 == doctest::Approx(1.63249).epsilon(1e-5));

    CHECK_THROWS_AS(critical_point(0.49), std::domain_error);
    CHECK_THROWS_AS(critical_point(0.7), std::domain_error);
}

TEST_CASE("verify_criticality identities") {
    const CriticalityReport half = verify_criticality(critical_point(0.5));
    CHECK(half.pass);
    CHECK(half.third_derivative == doctest::Approx(-8.0).epsilon(1e-9));

    const CriticalityReport two_thirds = verify_criticality(critical_point(2.0 / 3.0));
    CHECK(two_thirds.pass);
    CHECK(two_thirds.third_derivative == doctest::Approx(-13.5).epsilon(1e-9));

    const CriticalityReport mid = verify_criticality(critical_point(0.55));
    CHECK(mid.pass);
    // (-6 cbar^2 + 6 cbar - 2) / (cbar (1-cbar))^2 at cbar = 0.55.
    CHECK(mid.third_derivative == doctest::Approx(-0.515 / 0.06125625).epsilon(1e-12));
    CHECK(mid.third_derivative <= -8.0);

    // A non-critical point must fail with named identities.
    CriticalPoint bogus = critical_point(0.55);
    bogus.alpha1_c += 0.25;
    const CriticalityReport bad = verify_criticality(bogus);
    CHECK_FALSE(bad.pass);
    CHECK_FALSE(bad.failures.empty());
}

TEST_CASE("second derivative sign profile along the critical curve") {
    const CriticalPoint cp = critical_point(0.55);
    const ModelParams params(1, cp.p_c, cp.alpha1_c, cp.alpha2);
    const std::vector<double> grid{0.1, 0.3, 0.55, 0.8, 0.95};
    const std::vector<int> signs = second_derivative_sign_profile(params, grid);
    REQUIRE(signs.size() == grid.size());
    CHECK(signs[0] == 1);
    CHECK(signs[1] == 1);
    CHECK(signs[2] == 0);
    CHECK(signs[3] == -1);
    CHECK(signs[4] == -1);

    // Full profile: nonnegative below cbar, nonpositive above.
    std::vector<double> fine;
    for (int g = 1; g < 100; ++g) fine.push_back(g / 100.0);
    const std::vector<int> profile = second_derivative_sign_profile(params, fine);
    for (std::size_t i = 0; i < fine.size(); ++i) {
        if (fine[i] < cp.cbar) CHECK(profile[i] >= 0);
        if (fine[i] > cp.cbar) CHECK(profile[i] <= 0);
    }
}

TEST_CASE("v_region_boundary: corner, interior, invalid") {
    const CriticalPoint cp = critical_point(0.55);
    const BoundarySample corner = v_region_boundary(cp.alpha2, cp.p_c);
    CHECK(corner.valid);
    CHECK(corner.alpha1_lower == doctest::Approx(cp.alpha1_c).epsilon(1e-6));
    CHECK(corner.alpha1_upper == doctest::Approx(cp.alpha1_c).epsilon(1e-6));

    const BoundarySample window = v_region_boundary(0.0, 0.05);
    CHECK(window.valid);
    CHECK(window.alpha1_lower < 6.0);
    CHECK(window.alpha1_upper > 6.0);
    CHECK(window.alpha1_lower > critical_point(0.5).alpha1_c - 1e-9);

    const BoundarySample above = v_region_boundary(0.0, 0.5);
    CHECK_FALSE(above.valid);
}

TEST_CASE("v_region_boundary matches a maximizer-count scan over alpha1") {
    // Brute force: classify_phase over an alpha1 grid brackets the window to
    // within the grid resolution.
    for (double p : {0.05, 0.08}) {
        const BoundarySample sample = v_region_boundary(0.0, p);
        REQUIRE(sample.valid);
        const double step = 1e-4;
        auto two_max = [&](double a1) {
            return classify_phase(ModelParams(1, p, a1, 0.0)).phase == Phase::LowTemperature;
        };
        CHECK(two_max(sample.alpha1_lower + 2.0 * step));
        CHECK(two_max(sample.alpha1_upper - 2.0 * step));
        CHECK_FALSE(two_max(sample.alpha1_lower - 2.0 * step));
        CHECK_FALSE(two_max(sample.alpha1_upper + 2.0 * step));
    }
}

TEST_CASE("phase_diagram_scan rows") {
    const auto single_high = phase_diagram_scan(0.5, {0.5}, {0.5});
    REQUIRE(single_high.size() == 1);
    CHECK(single_high[0].phase == Phase::HighTemperature);
    CHECK(single_high[0].fixed_point_count == 1);

    const auto single_low = phase_diagram_scan(0.0, {0.05}, {6.0});
    REQUIRE(single_low.size() == 1);
    CHECK(single_low[0].phase == Phase::LowTemperature);
    CHECK(single_low[0].fixed_point_count == 3);

    // Grid through the corner of the V: degenerate at the corner, high
    // temperature outside.
    const CriticalPoint cp = critical_point(0.5);
    const auto rows =
        phase_diagram_scan(cp.alpha2, {cp.p_c, 0.3}, {cp.alpha1_c - 0.5, cp.alpha1_c});
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].p == doctest::Approx(cp.p_c));
    CHECK(rows[0].alpha1 == doctest::Approx(cp.alpha1_c - 0.5));
    CHECK(rows[0].phase == Phase::HighTemperature);
    CHECK(rows[1].phase == Phase::Degenerate);
    CHECK(rows[2].phase == Phase::HighTemperature);
    CHECK(rows[3].phase == Phase::HighTemperature);

    CHECK_THROWS_AS(phase_diagram_scan(0.0, {}, {1.0}), std::invalid_argument);
}
