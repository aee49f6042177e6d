#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "vwergm/model.hpp"
#include "vwergm/rng.hpp"

namespace vwergm {

/// Cached update probabilities P(spin -> 1 | s neighbors at 1) for every
/// s in [0, n-1]; the hot loops index this instead of re-evaluating exp.
struct UpdateTable {
    Eigen::VectorXd plus;  // size n
    explicit UpdateTable(const ModelParams& params);
};

/// A configuration, its step counter and its generator state.
struct ChainState {
    SpinConfiguration config;
    std::int64_t time;
    Xoshiro256pp rng;

    ChainState(SpinConfiguration config, std::uint64_t seed)
        : config(std::move(config)), time(0), rng(seed) {}
};

/// Chain start specifications.
struct Start {
    enum class Kind { AllOnes, AllZeros, Level, Given };
    Kind kind;
    int level = 0;
    std::optional<SpinConfiguration> config;

    static Start all_ones() { return {Kind::AllOnes, 0, std::nullopt}; }
    static Start all_zeros() { return {Kind::AllZeros, 0, std::nullopt}; }
    static Start at_level(int k) { return {Kind::Level, k, std::nullopt}; }
    static Start given(SpinConfiguration c) { return {Kind::Given, 0, std::move(c)}; }
};

SpinConfiguration make_start(const ModelParams& params, const Start& start);

struct Trajectory {
    ModelParams params;
    std::int64_t stride;
    std::uint64_t seed;
    std::vector<double> magnetizations;  // c at steps 0, stride, 2*stride, ...
};

struct CouplingRun {
    std::int64_t tau;  // coalescence step; equals cap when timed_out
    bool timed_out;
    std::int64_t cap;
    std::uint64_t seed;
};

struct BurnInResult {
    std::int64_t tau0;  // first time |c_t - c_star| <= 1/n; cap when timed_out
    bool timed_out;
    std::int64_t cap;
    double c_star;
    double start_c;
};

struct DriftEstimate {
    double mean;      // empirical one-step drift of c
    double std_err;
    double exact;     // (P_u(k) - P_d(k)) / n from the kernel
    int level;
};

struct EscapeResult {
    std::int64_t t;  // first crossing of the repellor level; cap when timed_out
    bool timed_out;
    std::int64_t cap;
};

enum class FromAttractor { Lower, Upper };

/// One Glauber update of the state (in place): uniform vertex choice, then
/// the spin is set to 1 iff U <= P_plus(s).
void step_inplace(ChainState& state, const ModelParams& params, const UpdateTable& table);

/// Value-semantics convenience wrapper over step_inplace.
ChainState step(ChainState state, const ModelParams& params);

/// Runs `steps` updates recording the magnetization every `stride` steps.
/// Refuses up front if the recording would exceed memory_budget_bytes.
Trajectory run(const ModelParams& params, const Start& start, std::int64_t steps,
               std::int64_t stride, std::uint64_t seed,
               std::int64_t memory_budget_bytes = std::int64_t{1} << 30);

/// One monotone-coupled update: both chains see the same vertex and the
/// same uniform. Requires (and preserves) top >= bottom coordinatewise.
void coupled_step_inplace(ChainState& top, ChainState& bottom, const ModelParams& params,
                          const UpdateTable& table);

std::pair<ChainState, ChainState> coupled_step(ChainState top, ChainState bottom,
                                               const ModelParams& params);

/// Grand coupling from the all-ones and all-zeros extremes; tau is the first
/// step at which the two chains coincide.
CouplingRun coupling_time(const ModelParams& params, std::uint64_t seed, std::int64_t cap);

/// Exact E[Hamming distance after one coupled step] for a unit-distance pair
/// with k common 1-spins:
///   1 - 1/n + (1/n) [ k (f(k) - f(k-1)) + (n-1-k) (f(k+1) - f(k)) ]
/// where f = update_prob_plus.
double one_step_contraction_exact(const ModelParams& params, int k);

/// First time the magnetization enters the 1/n band around the target fixed
/// point. Without an explicit target the unique fixed point is used;
/// low-temperature parameter sets are refused as ambiguous.
BurnInResult burn_in_time(const ModelParams& params, double start_c, std::uint64_t seed,
                          std::int64_t cap, std::optional<double> target_c = std::nullopt);

/// Empirical one-step drift at level floor(c n) over fresh replicas, next to
/// the exact kernel drift at the same level.
DriftEstimate drift_estimate(const ModelParams& params, double c, std::int64_t replicas,
                             std::uint64_t seed);

/// Low-temperature only: start at the chosen attractor's level and return
/// the first time the magnetization crosses the repellor toward the other
/// attractor.
EscapeResult mode_escape_time(const ModelParams& params, FromAttractor from, std::uint64_t seed,
                              std::int64_t cap);

}  // namespace vwergm
