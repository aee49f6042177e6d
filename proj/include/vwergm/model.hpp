#pragma once

#include <cstdint>
#include <vector>

namespace vwergm {

/// Parameters of the vertex-weighted Gibbs measure and its Glauber dynamics:
/// n vertices, spin-1 prior p in (0,1), edge coefficient alpha1 >= 0 and
/// triangle coefficient alpha2 >= 0. Construction validates; nothing else
/// re-checks.
struct ModelParams {
    int n;
    double p;
    double alpha1;
    double alpha2;

    ModelParams(int n, double p, double alpha1, double alpha2);

    /// Same interaction parameters at a different system size.
    ModelParams with_n(int new_n) const { return ModelParams(new_n, p, alpha1, alpha2); }

    /// log(p / (1-p))
    double logit_p() const;
};

/// A 0/1 spin assignment on n ordered vertices with a cached count of
/// 1-spins. The cache is maintained on every mutation; debug builds recount.
class SpinConfiguration {
public:
    SpinConfiguration(int n, bool all_ones);

    /// Configuration with spins 0..k-1 set to 1 (any arrangement is
    /// equivalent under the level-exchangeable measure).
    static SpinConfiguration at_level(int n, int k);

    int n() const { return static_cast<int>(spins_.size()); }
    int ones_count() const { return ones_; }
    bool spin(int i) const { return spins_[static_cast<std::size_t>(i)] != 0; }
    void set_spin(int i, bool value);
    double magnetization() const { return static_cast<double>(ones_) / n(); }

    /// Recounts the cache from scratch; throws on mismatch. Used at
    /// checkpoints in long simulations and tests.
    void check_consistency() const;

private:
    std::vector<std::uint8_t> spins_;
    int ones_ = 0;
};

/// First two moments of a vertex-weight distribution supported on [0,1].
/// Enforces m1^2 <= m2 <= m1 on construction.
struct MomentPair {
    double m1;  // E(U)
    double m2;  // E(U^2)
    MomentPair(double m1, double m2);
};

struct EdgeTriangleDensity {
    double e;  // expected edge weight
    double t;  // expected triangle weight
};

/// H'(s) = (alpha1/n) s + (alpha2/(2 n^2)) s (s-1): the conditional field at
/// a vertex given s spin-1 vertices among the others. Requires 0 <= s <= n-1.
double local_field(const ModelParams& params, int s);

/// P(update to spin 1 | s others at spin 1) and its complement. The two are
/// computed as the two fractions over a common denominator, so they sum to 1
/// within one ulp.
double update_prob_plus(const ModelParams& params, int s);
double update_prob_minus(const ModelParams& params, int s);

/// Asymptotic update probability lambda(c) = sigma(logit p + alpha1 c +
/// (alpha2/2) c^2) for c in [0,1].
double lambda(const ModelParams& params, double c);

/// Closed-form first, second or third derivative of lambda at c.
double lambda_derivative(const ModelParams& params, double c, int order);

/// Free-energy density phi(c) = (alpha1/2) c^2 + (alpha2/6) c^3
/// - c log(c/p) - (1-c) log((1-c)/(1-p)), with the 0 log 0 = 0 convention at
/// the endpoints.
double phi(const ModelParams& params, double c);

/// Closed-form derivatives of phi; orders 1..3. Diverges at the endpoints,
/// so 0 < c < 1 is required.
double phi_derivative(const ModelParams& params, double c, int order);

/// log a_k = log C(n,k) + (alpha1/n) C(k,2) + (alpha2/n^2) C(k,3)
/// + k log p + (n-k) log(1-p), evaluated fully in log space.
double log_level_weight(const ModelParams& params, int k);

/// Hamiltonian H(X) = (alpha1/n) C(w,2) + (alpha2/n^2) C(w,3) with
/// w = ones_count(X); depends on X only through its level.
double hamiltonian(const ModelParams& params, const SpinConfiguration& config);

/// Number of complete m-vertex subgraphs induced by c1 spin-1 vertices:
/// binomial(c1, m). Throws std::overflow_error beyond 64 bits.
std::uint64_t subgraph_count(std::uint64_t c1, std::uint64_t m);

/// Expected edge/triangle densities (e, t) = (m1^2, m2^3) of the
/// vertex-weighted random graph; always lands in e^3 <= t <= e^(3/2).
EdgeTriangleDensity density_region(const MomentPair& moments);

}  // namespace vwergm
