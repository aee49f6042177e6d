#include "vwergm/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace vwergm {

namespace {

// x * log(x / y) with the limit convention 0 log 0 = 0.
double xlog_ratio(double x, double y) {
    if (x == 0.0) return 0.0;
    return x * std::log(x / y);
}

// The pair (e^x/(1+e^x), 1/(1+e^x)) evaluated from the side that avoids
// overflow; both entries share one denominator.
struct LogisticPair {
    double plus;
    double minus;
};

LogisticPair logistic_pair(double x) {
    if (x >= 0.0) {
        const double e = std::exp(-x);
        const double den = 1.0 + e;
        return {1.0 / den, e / den};
    }
    const double e = std::exp(x);
    const double den = 1.0 + e;
    return {e / den, 1.0 / den};
}

double binom2(double k) { return 0.5 * k * (k - 1.0); }
double binom3(double k) { return k * (k - 1.0) * (k - 2.0) / 6.0; }

void require_neighbor_count(const ModelParams& params, int s) {
    if (s < 0 || s > params.n - 1)
        throw std::domain_error("neighbor spin count s must lie in [0, n-1], got " +
                                std::to_string(s));
}

void require_unit_interval(double c) {
    if (!(c >= 0.0 && c <= 1.0))
        throw std::domain_error("magnetization c must lie in [0, 1], got " + std::to_string(c));
}

}  // namespace

ModelParams::ModelParams(int n_, double p_, double alpha1_, double alpha2_)
    : n(n_), p(p_), alpha1(alpha1_), alpha2(alpha2_) {
    if (n < 1) throw std::invalid_argument("ModelParams: n must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("ModelParams: p must lie in (0, 1)");
    if (!(alpha1 >= 0.0)) throw std::invalid_argument("ModelParams: alpha1 must be >= 0");
    if (!(alpha2 >= 0.0)) throw std::invalid_argument("ModelParams: alpha2 must be >= 0");
}

double ModelParams::logit_p() const { return std::log(p) - std::log1p(-p); }

SpinConfiguration::SpinConfiguration(int n, bool all_ones)
    : spins_(static_cast<std::size_t>(n), all_ones ? 1 : 0), ones_(all_ones ? n : 0) {
    if (n < 1) throw std::invalid_argument("SpinConfiguration: n must be >= 1");
}

SpinConfiguration SpinConfiguration::at_level(int n, int k) {
    if (k < 0 || k > n) throw std::domain_error("SpinConfiguration::at_level: k out of [0, n]");
    SpinConfiguration config(n, false);
    for (int i = 0; i < k; ++i) config.spins_[static_cast<std::size_t>(i)] = 1;
    config.ones_ = k;
    return config;
}

void SpinConfiguration::set_spin(int i, bool value) {
    std::uint8_t& slot = spins_[static_cast<std::size_t>(i)];
    ones_ += static_cast<int>(value) - static_cast<int>(slot);
    slot = value ? 1 : 0;
#ifndef NDEBUG
    check_consistency();
#endif
}

void SpinConfiguration::check_consistency() const {
    int count = 0;
    for (std::uint8_t s : spins_) count += s;
    if (count != ones_ || ones_ < 0 || ones_ > n())
        throw std::logic_error("SpinConfiguration: ones_count cache is inconsistent");
}

MomentPair::MomentPair(double m1_, double m2_) : m1(m1_), m2(m2_) {
    if (!(m1 >= 0.0 && m1 <= 1.0) || !(m2 >= 0.0 && m2 <= 1.0))
        throw std::invalid_argument("MomentPair: moments must lie in [0, 1]");
    if (!(m1 * m1 <= m2))
        throw std::invalid_argument("MomentPair: requires m1^2 <= m2 (Cauchy-Schwarz)");
    if (!(m2 <= m1))
        throw std::invalid_argument("MomentPair: requires m2 <= m1 (support in [0, 1])");
}

double local_field(const ModelParams& params, int s) {
    require_neighbor_count(params, s);
    const double n = params.n;
    const double sd = s;
    return params.alpha1 / n * sd + params.alpha2 / (2.0 * n * n) * sd * (sd - 1.0);
}

double update_prob_plus(const ModelParams& params, int s) {
    return logistic_pair(params.logit_p() + local_field(params, s)).plus;
}

double update_prob_minus(const ModelParams& params, int s) {
    return logistic_pair(params.logit_p() + local_field(params, s)).minus;
}

double lambda(const ModelParams& params, double c) {
    require_unit_interval(c);
    const double g = params.alpha1 * c + 0.5 * params.alpha2 * c * c;
    return logistic_pair(params.logit_p() + g).plus;
}

double lambda_derivative(const ModelParams& params, double c, int order) {
    require_unit_interval(c);
    if (order < 1 || order > 3) throw std::domain_error("lambda_derivative: order must be 1, 2 or 3");
    const double l = lambda(params, c);
    const double u = l * (1.0 - l);
    const double h = params.alpha1 + params.alpha2 * c;
    const double a2 = params.alpha2;
    const double d1 = u * h;
    if (order == 1) return d1;
    const double w = 1.0 - 2.0 * l;
    const double d2 = d1 * h * w + u * a2;
    if (order == 2) return d2;
    return d2 * w * h - 2.0 * d1 * d1 * h + 2.0 * d1 * w * a2;
}

double phi(const ModelParams& params, double c) {
    require_unit_interval(c);
    return 0.5 * params.alpha1 * c * c + params.alpha2 / 6.0 * c * c * c -
           xlog_ratio(c, params.p) - xlog_ratio(1.0 - c, 1.0 - params.p);
}

double phi_derivative(const ModelParams& params, double c, int order) {
    if (!(c > 0.0 && c < 1.0))
        throw std::domain_error("phi_derivative: diverges at the endpoints, need 0 < c < 1");
    if (order < 1 || order > 3) throw std::domain_error("phi_derivative: order must be 1, 2 or 3");
    switch (order) {
        case 1:
            return params.logit_p() + params.alpha1 * c + 0.5 * params.alpha2 * c * c -
                   std::log(c / (1.0 - c));
        case 2:
            return params.alpha1 + params.alpha2 * c - 1.0 / (c * (1.0 - c));
        default: {
            const double cc = c * (1.0 - c);
            return params.alpha2 + (1.0 - 2.0 * c) / (cc * cc);
        }
    }
}

double log_level_weight(const ModelParams& params, int k) {
    if (k < 0 || k > params.n) throw std::domain_error("log_level_weight: k out of [0, n]");
    const double n = params.n;
    const double kd = k;
    const double log_binom =
        std::lgamma(n + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(n - kd + 1.0);
    const double exponent =
        params.alpha1 / n * binom2(kd) + params.alpha2 / (n * n) * binom3(kd);
    return log_binom + exponent + kd * std::log(params.p) + (n - kd) * std::log1p(-params.p);
}

double hamiltonian(const ModelParams& params, const SpinConfiguration& config) {
    if (config.n() != params.n)
        throw std::invalid_argument("hamiltonian: configuration length differs from n");
    const double n = params.n;
    const double w = config.ones_count();
    return params.alpha1 / n * binom2(w) + params.alpha2 / (n * n) * binom3(w);
}

std::uint64_t subgraph_count(std::uint64_t c1, std::uint64_t m) {
    if (m > c1) return 0;
    if (c1 - m < m) m = c1 - m;
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= m; ++i) {
        r = r * (c1 - m + i) / i;  // exact: C(c1-m+i, i) is integral
        if (r > std::numeric_limits<std::uint64_t>::max())
            throw std::overflow_error("subgraph_count: binomial exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(r);
}

EdgeTriangleDensity density_region(const MomentPair& moments) {
    return {moments.m1 * moments.m1, moments.m2 * moments.m2 * moments.m2};
}

}  // namespace vwergm
