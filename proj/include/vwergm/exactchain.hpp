#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vwergm/model.hpp"

namespace vwergm {

/// Exact transition probabilities of the (n+1)-level magnetization chain.
/// All three vectors have size n+1; up[n] and down[0] are structural zeros.
struct MagnetizationKernel {
    int n;
    Eigen::VectorXd up;    // P(k -> k+1)
    Eigen::VectorXd down;  // P(k -> k-1)
    Eigen::VectorXd stay;  // P(k -> k)
};

/// Level weights log a_k and the log partition function.
struct StationaryDistribution {
    Eigen::VectorXd log_weights;  // log a_k, size n+1
    double log_z;

    /// pi(A_k) = exp(log a_k - log Z) as a probability vector.
    Eigen::VectorXd probabilities() const {
        return (log_weights.array() - log_z).exp().matrix();
    }
};

struct SpectralReport {
    double gap;              // 1 - eigenvalue_2
    double relaxation_time;  // 1 / gap
    double eigenvalue_2;     // second-largest eigenvalue of the kernel
};

enum class MixingStarts { All, Extremes };

struct MixingReport {
    double epsilon;
    std::int64_t t_mix;
    int worst_start;  // start level attaining the max TV distance at t_mix
};

struct BottleneckReport {
    double phi_star;
    double log_phi_star;         // exact even when phi_star underflows scale
    int argmin_cut;              // cut between levels k and k+1
    double t_mix_lower_bound;    // 1 / (4 phi_star)
};

/// Five-way consistency report of the full 2^n chain against the projected
/// machinery; violations are the max relative mismatches observed.
struct OracleReport {
    int n;
    double stationarity_violation;       // pi P vs pi            (tol 1e-10)
    double reversibility_violation;      // pi(X)P(X,Y) symmetry  (tol 1e-12)
    double kernel_projection_violation;  // level sums vs kernel  (tol 1e-12)
    double level_marginal_violation;     // pi marginal vs a_k/Z  (tol 1e-10)
    double tv_equality_violation;        // full vs projected TV  (tol 1e-10)
    bool pass;
    std::string detail;  // empty unless a check failed
};

/// Raised when exact TV iteration hits its step cap; carries the distance
/// reached so callers can fall back to spectral or bottleneck bounds.
class CapExceededError : public std::runtime_error {
public:
    CapExceededError(std::int64_t cap, double distance)
        : std::runtime_error("exact_mixing_time: step cap " + std::to_string(cap) +
                             " reached with d(cap) = " + std::to_string(distance)),
          cap(cap),
          distance_at_cap(distance) {}
    std::int64_t cap;
    double distance_at_cap;
};

MagnetizationKernel build_kernel(const ModelParams& params);

StationaryDistribution stationary(const ModelParams& params);

/// Max over adjacent levels of the relative detailed-balance violation
/// |pi_k up_k / (pi_{k+1} down_{k+1}) - 1|, evaluated in log space.
double check_detailed_balance(const MagnetizationKernel& kernel,
                              const StationaryDistribution& dist);

/// Spectral gap of the level chain via Sturm-sequence bisection on the
/// similarity-symmetrized tridiagonal matrix. Throws std::runtime_error if
/// the inputs fail detailed balance beyond 1e-8.
SpectralReport spectral_gap(const MagnetizationKernel& kernel,
                            const StationaryDistribution& dist);

/// Exact total-variation mixing time of the level chain by iterating the
/// row distributions of the selected starts. Throws CapExceededError when
/// the cap is hit (the expected outcome in exponentially slow regimes).
MixingReport exact_mixing_time(const MagnetizationKernel& kernel,
                               const StationaryDistribution& dist,
                               double epsilon = 0.25,
                               MixingStarts starts = MixingStarts::Extremes,
                               std::int64_t cap = 1000000000);

/// Minimal flow-to-mass ratio over level cuts, considering a bottom block
/// {0..k} or top block {k+1..n} whenever its stationary mass is <= 1/2.
BottleneckReport bottleneck_ratio(const MagnetizationKernel& kernel,
                                  const StationaryDistribution& dist);

/// Brute-force verification on the full 2^n configuration chain (n <= 12):
/// stationarity, reversibility, kernel projection, level marginals, and
/// equality of full and projected TV decay from the all-ones start.
OracleReport full_chain_oracle(const ModelParams& params);

/// |log a_{floor(cn)} / n - phi(c)|, the finite-n defect of the level-weight
/// growth rate.
double stirling_residual(const ModelParams& params, double c);

}  // namespace vwergm
