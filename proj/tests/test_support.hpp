#pragma once

// Shared numeric helpers for the test binaries only.

#include <cmath>
#include <stdexcept>

namespace testsupport {

// Regularized upper incomplete gamma Q(a, x): series for small x, continued
// fraction otherwise (the usual Numerical Recipes split at x = a + 1).
inline double igamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("igamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double log_gamma_a = std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int it = 0; it < 500; ++it) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-15) break;
        }
        const double p = sum * std::exp(-x + a * std::log(x) - log_gamma_a);
        return 1.0 - p;
    }
    // Lentz continued fraction for Q.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - log_gamma_a);
}

// Survival function of the chi-squared distribution with dof degrees.
inline double chi2_sf(double statistic, double dof) {
    return igamma_q(0.5 * dof, 0.5 * statistic);
}

}  // namespace testsupport
