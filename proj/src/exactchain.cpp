#include "vwergm/exactchain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vwergm {

namespace {

double logsumexp(const Eigen::VectorXd& v) {
    const double m = v.maxCoeff();
    return m + std::log((v.array() - m).exp().sum());
}

// lse(a, b) without materializing a vector.
double lse2(double a, double b) {
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

// Number of eigenvalues of the symmetric tridiagonal matrix (diag d,
// off-diag b) strictly below x, by the standard LDL^T Sturm count with the
// LAPACK-style pivot safeguard.
int sturm_count_below(const Eigen::VectorXd& d, const Eigen::VectorXd& b, double x) {
    const int m = static_cast<int>(d.size());
    const double pivmin = 1e-300;
    int count = 0;
    double q = d[0] - x;
    if (q < 0.0) ++count;
    for (int i = 1; i < m; ++i) {
        if (std::abs(q) < pivmin) q = -pivmin;
        q = d[i] - x - b[i - 1] * b[i - 1] / q;
        if (q < 0.0) ++count;
    }
    return count;
}

// The rank-th largest eigenvalue (rank = 1 is the largest) via bisection on
// the Sturm count.
double tridiag_eigenvalue(const Eigen::VectorXd& d, const Eigen::VectorXd& b, int rank) {
    const int m = static_cast<int>(d.size());
    double lo = d[0], hi = d[0];
    for (int i = 0; i < m; ++i) {
        const double r = (i > 0 ? std::abs(b[i - 1]) : 0.0) + (i + 1 < m ? std::abs(b[i]) : 0.0);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    // x exceeds the rank-th largest eigenvalue iff count_below(x) >= m-rank+1.
    const int threshold = m - rank + 1;
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count_below(d, b, mid) >= threshold)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// One step of the level chain applied to a row distribution.
void kernel_step(const MagnetizationKernel& k, const Eigen::VectorXd& mu, Eigen::VectorXd& out) {
    const int n = k.n;
    out = mu.cwiseProduct(k.stay);
    out.tail(n) += mu.head(n).cwiseProduct(k.up.head(n));
    out.head(n) += mu.tail(n).cwiseProduct(k.down.tail(n));
}

double tv_distance(const Eigen::VectorXd& mu, const Eigen::VectorXd& pi) {
    return 0.5 * (mu - pi).lpNorm<1>();
}

}  // namespace

MagnetizationKernel build_kernel(const ModelParams& params) {
    const int n = params.n;
    MagnetizationKernel kernel{n, Eigen::VectorXd::Zero(n + 1), Eigen::VectorXd::Zero(n + 1),
                               Eigen::VectorXd::Zero(n + 1)};
    for (int k = 0; k <= n; ++k) {
        const double frac1 = static_cast<double>(k) / n;
        if (k < n) kernel.up[k] = (1.0 - frac1) * update_prob_plus(params, k);
        if (k > 0) kernel.down[k] = frac1 * update_prob_minus(params, k - 1);
        kernel.stay[k] = 1.0 - kernel.up[k] - kernel.down[k];
    }
    return kernel;
}

StationaryDistribution stationary(const ModelParams& params) {
    const int n = params.n;
    StationaryDistribution dist{Eigen::VectorXd(n + 1), 0.0};
    // Built by the exact one-level recurrence so that adjacent differences
    // carry at most one rounding of the running weight; log_level_weight
    // agrees with these values but not to the last ulp at large n.
    dist.log_weights[0] = n * std::log1p(-params.p);
    const double logit = params.logit_p();
    for (int k = 0; k < n; ++k) {
        const double step =
            logit + std::log((n - k) / static_cast<double>(k + 1)) + local_field(params, k);
        dist.log_weights[k + 1] = dist.log_weights[k] + step;
    }
    dist.log_z = logsumexp(dist.log_weights);
    return dist;
}

double check_detailed_balance(const MagnetizationKernel& kernel,
                              const StationaryDistribution& dist) {
    if (kernel.n + 1 != dist.log_weights.size())
        throw std::invalid_argument("check_detailed_balance: size mismatch");
    double worst = 0.0;
    for (int k = 0; k < kernel.n; ++k) {
        const double delta = dist.log_weights[k] + std::log(kernel.up[k]) -
                             dist.log_weights[k + 1] - std::log(kernel.down[k + 1]);
        worst = std::max(worst, std::abs(std::expm1(delta)));
    }
    return worst;
}

SpectralReport spectral_gap(const MagnetizationKernel& kernel,
                            const StationaryDistribution& dist) {
    const double violation = check_detailed_balance(kernel, dist);
    if (violation > 1e-8)
        throw std::runtime_error(
            "spectral_gap: kernel and distribution fail detailed balance (violation " +
            std::to_string(violation) + "); cannot symmetrize");
    const int n = kernel.n;
    Eigen::VectorXd offdiag(n);
    for (int k = 0; k < n; ++k) offdiag[k] = std::sqrt(kernel.up[k] * kernel.down[k + 1]);

    const double top = tridiag_eigenvalue(kernel.stay, offdiag, 1);
    if (std::abs(top - 1.0) > 1e-8)
        throw std::runtime_error("spectral_gap: leading eigenvalue " + std::to_string(top) +
                                 " is not 1; inconsistent kernel");
    const double second = tridiag_eigenvalue(kernel.stay, offdiag, 2);
    SpectralReport report{1.0 - second, 0.0, second};
    report.relaxation_time = 1.0 / report.gap;
    return report;
}

MixingReport exact_mixing_time(const MagnetizationKernel& kernel,
                               const StationaryDistribution& dist, double epsilon,
                               MixingStarts starts, std::int64_t cap) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("exact_mixing_time: epsilon must lie in (0, 1)");
    if (cap < 1) throw std::invalid_argument("exact_mixing_time: cap must be >= 1");
    const int n = kernel.n;
    const Eigen::VectorXd pi = dist.probabilities();

    std::vector<int> start_levels;
    if (starts == MixingStarts::Extremes) {
        start_levels = {0, n};
    } else {
        start_levels.resize(n + 1);
        for (int k = 0; k <= n; ++k) start_levels[k] = k;
    }

    std::vector<Eigen::VectorXd> mus;
    for (int level : start_levels) {
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(n + 1);
        mu[level] = 1.0;
        mus.push_back(std::move(mu));
    }

    auto worst_distance = [&](int* arg) {
        double d = -1.0;
        for (std::size_t i = 0; i < mus.size(); ++i) {
            const double tv = tv_distance(mus[i], pi);
            if (tv > d) {
                d = tv;
                if (arg) *arg = start_levels[i];
            }
        }
        return d;
    };

    int worst = 0;
    double d = worst_distance(&worst);
    if (d <= epsilon) return {epsilon, 0, worst};

    Eigen::VectorXd scratch(n + 1);
    for (std::int64_t t = 1; t <= cap; ++t) {
        for (Eigen::VectorXd& mu : mus) {
            kernel_step(kernel, mu, scratch);
            mu.swap(scratch);
        }
        const double prev = d;
        d = worst_distance(&worst);
        if (d > prev + 1e-12)
            throw std::logic_error("exact_mixing_time: TV distance increased, kernel corrupt");
        if (d <= epsilon) return {epsilon, t, worst};
    }
    throw CapExceededError(cap, d);
}

BottleneckReport bottleneck_ratio(const MagnetizationKernel& kernel,
                                  const StationaryDistribution& dist) {
    const int n = kernel.n;
    const Eigen::VectorXd log_pi = dist.log_weights.array() - dist.log_z;

    // Running log masses of the bottom block {0..k} and top block {k+1..n}.
    Eigen::VectorXd log_bottom(n + 1), log_top(n + 1);
    log_bottom[0] = log_pi[0];
    for (int k = 1; k <= n; ++k) log_bottom[k] = lse2(log_bottom[k - 1], log_pi[k]);
    log_top[n] = log_pi[n];
    for (int k = n - 1; k >= 0; --k) log_top[k] = lse2(log_top[k + 1], log_pi[k]);

    const double log_half = std::log(0.5);
    double best = std::numeric_limits<double>::infinity();
    int best_cut = -1;
    for (int k = 0; k < n; ++k) {
        const double log_flow = log_pi[k] + std::log(kernel.up[k]);
        if (log_bottom[k] <= log_half && log_flow - log_bottom[k] < best) {
            best = log_flow - log_bottom[k];
            best_cut = k;
        }
        if (log_top[k + 1] <= log_half && log_flow - log_top[k + 1] < best) {
            best = log_flow - log_top[k + 1];
            best_cut = k;
        }
    }
    if (best_cut < 0) throw std::logic_error("bottleneck_ratio: no admissible cut found");
    BottleneckReport report{std::exp(best), best, best_cut, 0.0};
    report.t_mix_lower_bound = 0.25 * std::exp(-best);
    return report;
}

OracleReport full_chain_oracle(const ModelParams& params) {
    const int n = params.n;
    if (n > 12) throw std::invalid_argument("full_chain_oracle: refuses n > 12");
    const std::size_t size = std::size_t{1} << n;

    // Unnormalized Gibbs weights, evaluated directly (no logs needed at this
    // scale) from the level-only Hamiltonian.
    Eigen::VectorXd weight(size);
    std::vector<int> ones(size);
    for (std::size_t x = 0; x < size; ++x) {
        int w = 0;
        for (int i = 0; i < n; ++i) w += (x >> i) & 1;
        ones[x] = w;
        const double wd = w;
        const double h = params.alpha1 / n * (0.5 * wd * (wd - 1.0)) +
                         params.alpha2 / (n * n) * (wd * (wd - 1.0) * (wd - 2.0) / 6.0);
        weight[x] = std::exp(h) * std::pow(params.p, w) * std::pow(1.0 - params.p, n - w);
    }
    const double z = weight.sum();
    const Eigen::VectorXd pi = weight / z;

    // Sparse transition structure: per state, the n single-flip moves plus
    // the diagonal. flip_prob[x*n+i] is P(x -> x with bit i flipped).
    std::vector<double> flip_prob(size * static_cast<std::size_t>(n));
    Eigen::VectorXd diag(size);
    for (std::size_t x = 0; x < size; ++x) {
        double stay = 0.0;
        for (int i = 0; i < n; ++i) {
            const std::size_t y = x ^ (std::size_t{1} << i);
            const std::size_t x1 = x | (std::size_t{1} << i);
            const std::size_t x0 = x & ~(std::size_t{1} << i);
            const double to_one = weight[x1] / (weight[x0] + weight[x1]);
            const bool bit = (x >> i) & 1;
            const double move = (bit ? 1.0 - to_one : to_one) / n;  // prob of flipping bit i
            flip_prob[x * static_cast<std::size_t>(n) + i] = move;
            stay += (bit ? to_one : 1.0 - to_one) / n;
        }
        diag[x] = stay;
    }

    OracleReport report{n, 0.0, 0.0, 0.0, 0.0, 0.0, true, ""};
    std::ostringstream detail;

    // (a) stationarity: pi P = pi.
    Eigen::VectorXd out = pi.cwiseProduct(diag);
    for (std::size_t x = 0; x < size; ++x)
        for (int i = 0; i < n; ++i)
            out[x ^ (std::size_t{1} << i)] += pi[x] * flip_prob[x * static_cast<std::size_t>(n) + i];
    for (std::size_t y = 0; y < size; ++y)
        report.stationarity_violation =
            std::max(report.stationarity_violation, std::abs(out[y] - pi[y]) / pi[y]);

    // (b) reversibility: pi(X) P(X,Y) = pi(Y) P(Y,X) over single-flip pairs.
    for (std::size_t x = 0; x < size; ++x) {
        for (int i = 0; i < n; ++i) {
            const std::size_t y = x ^ (std::size_t{1} << i);
            if (y < x) continue;
            const double fwd = pi[x] * flip_prob[x * static_cast<std::size_t>(n) + i];
            const double bwd = pi[y] * flip_prob[y * static_cast<std::size_t>(n) + i];
            report.reversibility_violation = std::max(
                report.reversibility_violation, std::abs(fwd - bwd) / std::max(fwd, bwd));
        }
    }

    // (c) level projection equals the magnetization kernel.
    const MagnetizationKernel kernel = build_kernel(params);
    for (std::size_t x = 0; x < size; ++x) {
        double up_sum = 0.0, down_sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double move = flip_prob[x * static_cast<std::size_t>(n) + i];
            if ((x >> i) & 1)
                down_sum += move;
            else
                up_sum += move;
        }
        const int k = ones[x];
        const double up_ref = kernel.up[k];
        const double down_ref = kernel.down[k];
        const double up_err =
            up_ref == 0.0 ? std::abs(up_sum) : std::abs(up_sum - up_ref) / up_ref;
        const double down_err =
            down_ref == 0.0 ? std::abs(down_sum) : std::abs(down_sum - down_ref) / down_ref;
        report.kernel_projection_violation =
            std::max({report.kernel_projection_violation, up_err, down_err});
    }

    // (d) level marginal of pi equals the stationary level distribution.
    const StationaryDistribution dist = stationary(params);
    const Eigen::VectorXd pi_levels = dist.probabilities();
    Eigen::VectorXd marginal = Eigen::VectorXd::Zero(n + 1);
    for (std::size_t x = 0; x < size; ++x) marginal[ones[x]] += pi[x];
    for (int k = 0; k <= n; ++k)
        report.level_marginal_violation =
            std::max(report.level_marginal_violation,
                     std::abs(marginal[k] - pi_levels[k]) / pi_levels[k]);

    // (e) TV decay from all-ones matches the projected chain from level n.
    Eigen::VectorXd nu = Eigen::VectorXd::Zero(size);
    nu[size - 1] = 1.0;
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(n + 1);
    mu[n] = 1.0;
    Eigen::VectorXd nu_next(size), mu_next(n + 1);
    for (int t = 0; t <= 200; ++t) {
        const double tv_full = 0.5 * (nu - pi).lpNorm<1>();
        const double tv_proj = tv_distance(mu, pi_levels);
        report.tv_equality_violation =
            std::max(report.tv_equality_violation, std::abs(tv_full - tv_proj));
        if (t == 200) break;
        nu_next = nu.cwiseProduct(diag);
        for (std::size_t x = 0; x < size; ++x)
            for (int i = 0; i < n; ++i)
                nu_next[x ^ (std::size_t{1} << i)] +=
                    nu[x] * flip_prob[x * static_cast<std::size_t>(n) + i];
        nu.swap(nu_next);
        kernel_step(kernel, mu, mu_next);
        mu.swap(mu_next);
    }

    auto flag = [&](double value, double tol, const char* name) {
        if (value > tol) {
            report.pass = false;
            detail << name << " violation " << value << " exceeds " << tol << "; ";
        }
    };
    flag(report.stationarity_violation, 1e-10, "stationarity");
    flag(report.reversibility_violation, 1e-12, "reversibility");
    flag(report.kernel_projection_violation, 1e-12, "kernel projection");
    flag(report.level_marginal_violation, 1e-10, "level marginal");
    flag(report.tv_equality_violation, 1e-10, "TV equality");
    report.detail = detail.str();
    return report;
}

double stirling_residual(const ModelParams& params, double c) {
    if (!(c > 0.0 && c < 1.0))
        throw std::domain_error("stirling_residual: need 0 < c < 1");
    const int k = static_cast<int>(std::floor(c * params.n));
    return std::abs(log_level_weight(params, k) / params.n - phi(params, c));
}

}  // namespace vwergm
