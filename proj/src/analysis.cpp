#include "vwergm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace vwergm {

namespace {

constexpr double kRootTol = 1e-13;        // bisection interval width
constexpr double kClassifyTol = 1e-9;     // attractor/repellor band around lambda' = 1
constexpr double kMergeTol = 1e-10;       // saddle-node root merging

// Bisection for a root of f on [lo, hi]; f(lo) and f(hi) must have opposite
// signs (f(lo) > 0 > f(hi) or the reverse).
double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::logic_error("bisect: endpoints do not bracket a sign change");
    while (hi - lo > kRootTol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval at floating-point resolution
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Walks toward 0 from `start` until f becomes positive. phi' and phi''' both
// blow up to +inf at 0, so this terminates for any admissible parameters.
double lower_bracket(const std::function<double(double)>& f, double start) {
    double lo = start;
    while (f(lo) <= 0.0) {
        lo *= 1e-3;
        if (lo < 1e-300) throw std::logic_error("lower_bracket: no positive value found near 0");
    }
    return lo;
}

// Walks toward 1 until f becomes negative (phi' and phi''' go to -inf at 1).
double upper_bracket(const std::function<double(double)>& f, double start) {
    double gap = 1.0 - start;
    while (f(1.0 - gap) >= 0.0) {
        gap *= 1e-3;
        if (1.0 - gap >= 1.0)
            throw std::logic_error("upper_bracket: no negative value found near 1");
    }
    return 1.0 - gap;
}

FixedPointKind classify_slope(double lambda_prime) {
    if (lambda_prime < 1.0 - kClassifyTol) return FixedPointKind::Attractor;
    if (lambda_prime > 1.0 + kClassifyTol) return FixedPointKind::Repellor;
    return FixedPointKind::Inflection;
}

// n(c) from the V-region construction: the value of -logit(p) at which c is
// a boundary transition point, given the alpha2 slice.
double boundary_n(double alpha2, double c) {
    return 1.0 / (1.0 - c) - std::log(c / (1.0 - c)) - 0.5 * alpha2 * c * c;
}

// m(c): the alpha1 that makes phi''(c) = 0.
double boundary_m(double alpha2, double c) { return 1.0 / (c * (1.0 - c)) - alpha2 * c; }

// Unique root of phi''' in (0,1): alpha2 = (2c-1) / (c (1-c))^2, which for
// alpha2 >= 0 lives in [1/2, 1).
double phi3_root(double alpha2) {
    auto g = [alpha2](double c) {
        const double cc = c * (1.0 - c);
        return alpha2 + (1.0 - 2.0 * c) / (cc * cc);  // phi''' for any p (p-independent)
    };
    const double lo = lower_bracket(g, 0.25);
    const double hi = upper_bracket(g, 1.0 - 1e-6);
    return bisect(g, lo, hi);
}

}  // namespace

std::vector<FixedPoint> find_fixed_points(const ModelParams& params) {
    auto d1 = [&params](double c) { return phi_derivative(params, c, 1); };
    auto d2 = [&params](double c) { return phi_derivative(params, c, 2); };

    // Any root z of phi'' satisfies z(1-z) >= 1/(alpha1+alpha2), so starting
    // the end brackets at distance 0.25/(alpha1+alpha2+4) from 0 and 1 keeps
    // them outside [z1, z2] for every admissible parameter set.
    const double margin = 0.25 / (params.alpha1 + params.alpha2 + 4.0);

    // Split (0,1) into pieces where phi' is monotone. phi''' decreases
    // strictly from +inf to -inf, so phi'' is unimodal with peak at c3; when
    // the peak is <= 0, phi' is monotone decreasing on all of (0,1).
    const double c3 = phi3_root(params.alpha2);
    std::vector<double> breakpoints;  // interior roots of phi''
    if (phi_derivative(params, c3, 2) > 0.0) {
        const double lo = lower_bracket([&d2](double c) { return -d2(c); }, margin);
        const double hi = upper_bracket(d2, 1.0 - margin);
        breakpoints.push_back(bisect(d2, lo, c3));
        breakpoints.push_back(bisect(d2, c3, hi));
    }

    // Bracket ends where phi' has a guaranteed sign.
    const double left = lower_bracket(d1, margin);
    const double right = upper_bracket(d1, 1.0 - margin);

    std::vector<double> nodes;
    nodes.push_back(left);
    for (double b : breakpoints)
        if (b > left && b < right) nodes.push_back(b);
    nodes.push_back(right);

    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double flo = d1(nodes[i]);
        const double fhi = d1(nodes[i + 1]);
        if ((flo > 0.0 && fhi < 0.0) || (flo < 0.0 && fhi > 0.0))
            roots.push_back(bisect(d1, nodes[i], nodes[i + 1]));
        else if (fhi == 0.0)
            roots.push_back(nodes[i + 1]);
    }

    std::sort(roots.begin(), roots.end());
    std::vector<double> merged;
    for (double r : roots) {
        if (!merged.empty() && r - merged.back() <= kMergeTol)
            merged.back() = 0.5 * (merged.back() + r);  // numerically one analytic root
        else
            merged.push_back(r);
    }

    std::vector<FixedPoint> result;
    for (double r : merged) {
        const double slope = lambda_derivative(params, r, 1);
        result.push_back({r, slope, classify_slope(slope)});
    }
    if (result.empty() || result.size() > 3)
        throw std::logic_error("find_fixed_points: root count outside [1, 3]");
    return result;
}

PhaseReport classify_phase(const ModelParams& params) {
    PhaseReport report;
    report.fixed_points = find_fixed_points(params);
    int attractors = 0;
    bool any_inflection = false;
    for (const FixedPoint& fp : report.fixed_points) {
        attractors += fp.kind == FixedPointKind::Attractor;
        any_inflection |= fp.kind == FixedPointKind::Inflection;
    }
    if (attractors >= 2)
        report.phase = Phase::LowTemperature;
    else if (report.fixed_points.size() == 1 && attractors == 1 && !any_inflection)
        report.phase = Phase::HighTemperature;
    else
        report.phase = Phase::Degenerate;
    return report;
}

CriticalPoint critical_point(double cbar) {
    if (!(cbar >= 0.5 && cbar <= 2.0 / 3.0))
        throw std::domain_error("critical_point: cbar must lie in [1/2, 2/3]");
    const double omc = 1.0 - cbar;
    const double alpha2 = (2.0 * cbar - 1.0) / (cbar * cbar * omc * omc);
    const double alpha1_c = (2.0 - 3.0 * cbar) / (cbar * omc * omc);
    const double b = (4.0 * cbar - 3.0) / (2.0 * omc * omc);
    const double num = cbar * std::exp(b);
    const double p_c = num / (num + omc);
    return {cbar, p_c, alpha1_c, alpha2};
}

CriticalityReport verify_criticality(const CriticalPoint& cp) {
    const ModelParams params(1, cp.p_c, cp.alpha1_c, cp.alpha2);
    CriticalityReport report{};
    report.fixed_point_residual = lambda(params, cp.cbar) - cp.cbar;
    report.slope_residual = lambda_derivative(params, cp.cbar, 1) - 1.0;
    report.second_derivative = lambda_derivative(params, cp.cbar, 2);
    report.third_derivative = lambda_derivative(params, cp.cbar, 3);
    const double cc = cp.cbar * (1.0 - cp.cbar);
    report.third_derivative_closed =
        (-6.0 * cp.cbar * cp.cbar + 6.0 * cp.cbar - 2.0) / (cc * cc);

    const double tol = 1e-9;
    if (std::abs(report.fixed_point_residual) > tol)
        report.failures.push_back("lambda(cbar) != cbar");
    if (std::abs(report.slope_residual) > tol) report.failures.push_back("lambda'(cbar) != 1");
    if (std::abs(report.second_derivative) > tol) report.failures.push_back("lambda''(cbar) != 0");
    if (report.third_derivative > -8.0 + tol) report.failures.push_back("lambda'''(cbar) > -8");
    if (std::abs(report.third_derivative - report.third_derivative_closed) > tol)
        report.failures.push_back("lambda'''(cbar) does not match its closed form");
    report.pass = report.failures.empty();
    return report;
}

std::vector<int> second_derivative_sign_profile(const ModelParams& params,
                                                const std::vector<double>& grid) {
    constexpr double slack = 1e-12;
    std::vector<int> signs;
    signs.reserve(grid.size());
    for (double c : grid) {
        const double d2 = lambda_derivative(params, c, 2);
        signs.push_back(d2 > slack ? 1 : (d2 < -slack ? -1 : 0));
    }
    return signs;
}

BoundarySample v_region_boundary(double alpha2, double p) {
    if (!(alpha2 >= 0.0)) throw std::invalid_argument("v_region_boundary: alpha2 must be >= 0");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("v_region_boundary: p must lie in (0,1)");

    const double cbar = phi3_root(alpha2);
    const double target = -(std::log(p) - std::log1p(-p));  // -logit(p)
    const double n_min = boundary_n(alpha2, cbar);

    BoundarySample sample{p, 0.0, 0.0, false};
    if (target < n_min - 1e-9) return sample;  // p above the corner: no two-maximizer alpha1
    if (target <= n_min + 1e-9) {
        // Corner of the V: the window collapses to alpha1_c.
        const double a1c = boundary_m(alpha2, cbar);
        return {p, a1c, a1c, true};
    }

    auto f = [alpha2, target](double c) { return boundary_n(alpha2, c) - target; };
    const double lo = lower_bracket(f, cbar * 0.5);
    const double hi = 1.0 - 1e-6;  // 1/(1-c) dominates every admissible target here
    const double a = bisect(f, lo, cbar);   // n decreasing on (0, cbar)
    const double b = bisect(f, cbar, hi);   // n increasing on (cbar, 1)
    sample.alpha1_upper = boundary_m(alpha2, a);
    sample.alpha1_lower = boundary_m(alpha2, b);
    sample.valid = true;
    return sample;
}

std::vector<PhaseDiagramRow> phase_diagram_scan(double alpha2,
                                                const std::vector<double>& p_grid,
                                                const std::vector<double>& alpha1_grid) {
    if (p_grid.empty() || alpha1_grid.empty())
        throw std::invalid_argument("phase_diagram_scan: grids must be nonempty");
    std::vector<PhaseDiagramRow> rows;
    rows.reserve(p_grid.size() * alpha1_grid.size());
    for (double p : p_grid) {
        for (double a1 : alpha1_grid) {
            const PhaseReport report = classify_phase(ModelParams(1, p, a1, alpha2));
            rows.push_back({p, a1, report.phase, static_cast<int>(report.fixed_points.size())});
        }
    }
    return rows;
}

const char* to_string(FixedPointKind kind) {
    switch (kind) {
        case FixedPointKind::Attractor: return "Attractor";
        case FixedPointKind::Repellor: return "Repellor";
        default: return "Inflection";
    }
}

const char* to_string(Phase phase) {
    switch (phase) {
        case Phase::HighTemperature: return "HighTemperature";
        case Phase::LowTemperature: return "LowTemperature";
        default: return "Degenerate";
    }
}

}  // namespace vwergm
