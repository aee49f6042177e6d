#include "vwergm/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "vwergm/analysis.hpp"
#include "vwergm/exactchain.hpp"

namespace vwergm {

UpdateTable::UpdateTable(const ModelParams& params) : plus(params.n) {
    for (int s = 0; s < params.n; ++s) plus[s] = update_prob_plus(params, s);
}

SpinConfiguration make_start(const ModelParams& params, const Start& start) {
    switch (start.kind) {
        case Start::Kind::AllOnes:
            return SpinConfiguration(params.n, true);
        case Start::Kind::AllZeros:
            return SpinConfiguration(params.n, false);
        case Start::Kind::Level:
            return SpinConfiguration::at_level(params.n, start.level);
        default:
            if (!start.config || start.config->n() != params.n)
                throw std::invalid_argument("make_start: given configuration has wrong length");
            return *start.config;
    }
}

void step_inplace(ChainState& state, const ModelParams& params, const UpdateTable& table) {
    const int i = static_cast<int>(state.rng.bounded(static_cast<std::uint64_t>(params.n)));
    const bool old_spin = state.config.spin(i);
    const int s = state.config.ones_count() - static_cast<int>(old_spin);
    const bool new_spin = state.rng.uniform01() <= table.plus[s];
    if (new_spin != old_spin) state.config.set_spin(i, new_spin);
    ++state.time;
}

ChainState step(ChainState state, const ModelParams& params) {
    const UpdateTable table(params);
    step_inplace(state, params, table);
    return state;
}

Trajectory run(const ModelParams& params, const Start& start, std::int64_t steps,
               std::int64_t stride, std::uint64_t seed, std::int64_t memory_budget_bytes) {
    if (steps < 0) throw std::invalid_argument("run: steps must be >= 0");
    if (stride < 1) throw std::invalid_argument("run: stride must be >= 1");
    const std::int64_t records = steps / stride + 1;
    if (records * static_cast<std::int64_t>(sizeof(double)) > memory_budget_bytes)
        throw std::invalid_argument("run: recording " + std::to_string(records) +
                                    " samples exceeds the memory budget");

    Trajectory trajectory{params, stride, seed, {}};
    trajectory.magnetizations.reserve(static_cast<std::size_t>(records));
    ChainState state(make_start(params, start), seed);
    const UpdateTable table(params);
    trajectory.magnetizations.push_back(state.config.magnetization());
    for (std::int64_t t = 1; t <= steps; ++t) {
        step_inplace(state, params, table);
        if (t % stride == 0) trajectory.magnetizations.push_back(state.config.magnetization());
    }
    return trajectory;
}

void coupled_step_inplace(ChainState& top, ChainState& bottom, const ModelParams& params,
                          const UpdateTable& table) {
    const int i = static_cast<int>(top.rng.bounded(static_cast<std::uint64_t>(params.n)));
    const double u = top.rng.uniform01();
    bottom.rng = top.rng;  // shared randomness: the pair advances one stream

    const bool top_old = top.config.spin(i);
    const bool bottom_old = bottom.config.spin(i);
    const int top_s = top.config.ones_count() - static_cast<int>(top_old);
    const int bottom_s = bottom.config.ones_count() - static_cast<int>(bottom_old);
    const bool top_new = u <= table.plus[top_s];
    const bool bottom_new = u <= table.plus[bottom_s];
    if (top_new != top_old) top.config.set_spin(i, top_new);
    if (bottom_new != bottom_old) bottom.config.set_spin(i, bottom_new);
    ++top.time;
    ++bottom.time;
#ifndef NDEBUG
    for (int j = 0; j < params.n; ++j)
        if (top.config.spin(j) < bottom.config.spin(j))
            throw std::logic_error("coupled_step: coordinatewise order violated");
#endif
}

std::pair<ChainState, ChainState> coupled_step(ChainState top, ChainState bottom,
                                               const ModelParams& params) {
    const UpdateTable table(params);
    coupled_step_inplace(top, bottom, params, table);
    return {std::move(top), std::move(bottom)};
}

CouplingRun coupling_time(const ModelParams& params, std::uint64_t seed, std::int64_t cap) {
    if (cap < 1) throw std::invalid_argument("coupling_time: cap must be >= 1");
    ChainState top(SpinConfiguration(params.n, true), seed);
    ChainState bottom(SpinConfiguration(params.n, false), seed);
    const UpdateTable table(params);
    // Under coordinatewise order the Hamming distance is the difference of
    // the ones counts, so coalescence is an O(1) check per step.
    for (std::int64_t t = 1; t <= cap; ++t) {
        coupled_step_inplace(top, bottom, params, table);
        if (top.config.ones_count() == bottom.config.ones_count()) return {t, false, cap, seed};
    }
    return {cap, true, cap, seed};
}

double one_step_contraction_exact(const ModelParams& params, int k) {
    const int n = params.n;
    if (k < 0 || k > n - 1)
        throw std::domain_error("one_step_contraction_exact: k must lie in [0, n-1]");
    auto f = [&params](int s) { return update_prob_plus(params, s); };
    double sum = 0.0;
    if (k >= 1) sum += k * (f(k) - f(k - 1));
    if (k <= n - 2) sum += (n - 1 - k) * (f(k + 1) - f(k));
    return 1.0 - 1.0 / n + sum / n;
}

BurnInResult burn_in_time(const ModelParams& params, double start_c, std::uint64_t seed,
                          std::int64_t cap, std::optional<double> target_c) {
    if (!(start_c >= 0.0 && start_c <= 1.0))
        throw std::invalid_argument("burn_in_time: start_c must lie in [0, 1]");
    if (cap < 0) throw std::invalid_argument("burn_in_time: cap must be >= 0");

    double c_star;
    if (target_c) {
        c_star = *target_c;
    } else {
        const PhaseReport report = classify_phase(params);
        if (report.fixed_points.size() != 1)
            throw std::invalid_argument(
                "burn_in_time: multiple fixed points; specify the target attractor explicitly");
        c_star = report.fixed_points.front().c;
    }

    const int n = params.n;
    const int start_level = std::min(n, static_cast<int>(std::floor(start_c * n)));
    ChainState state(SpinConfiguration::at_level(n, start_level), seed);
    const UpdateTable table(params);
    const double target_level = c_star * n;

    auto in_band = [&](int k) { return std::abs(k - target_level) <= 1.0; };
    if (in_band(state.config.ones_count())) return {0, false, cap, c_star, start_c};
    for (std::int64_t t = 1; t <= cap; ++t) {
        step_inplace(state, params, table);
        if (in_band(state.config.ones_count())) return {t, false, cap, c_star, start_c};
    }
    return {cap, true, cap, c_star, start_c};
}

DriftEstimate drift_estimate(const ModelParams& params, double c, std::int64_t replicas,
                             std::uint64_t seed) {
    if (replicas < 1) throw std::invalid_argument("drift_estimate: replicas must be >= 1");
    if (!(c >= 0.0 && c <= 1.0))
        throw std::invalid_argument("drift_estimate: c must lie in [0, 1]");
    const int n = params.n;
    const int level = std::min(n, static_cast<int>(std::floor(c * n)));

    const MagnetizationKernel kernel = build_kernel(params);
    const double exact = (kernel.up[level] - kernel.down[level]) / n;

    const UpdateTable table(params);
    double sum = 0.0, sum_sq = 0.0;
    for (std::int64_t r = 0; r < replicas; ++r) {
        ChainState state(SpinConfiguration::at_level(n, level), mix64(seed, static_cast<std::uint64_t>(r)));
        step_inplace(state, params, table);
        const double delta = static_cast<double>(state.config.ones_count() - level) / n;
        sum += delta;
        sum_sq += delta * delta;
    }
    const double mean = sum / static_cast<double>(replicas);
    const double var =
        replicas > 1 ? (sum_sq - sum * mean) / static_cast<double>(replicas - 1) : 0.0;
    const double std_err = std::sqrt(std::max(0.0, var) / static_cast<double>(replicas));
    return {mean, std_err, exact, level};
}

EscapeResult mode_escape_time(const ModelParams& params, FromAttractor from, std::uint64_t seed,
                              std::int64_t cap) {
    const PhaseReport report = classify_phase(params);
    if (report.phase != Phase::LowTemperature)
        throw std::invalid_argument("mode_escape_time: requires low-temperature parameters");

    double lower_attr = -1.0, upper_attr = -1.0, repellor = -1.0;
    for (const FixedPoint& fp : report.fixed_points) {
        if (fp.kind == FixedPointKind::Attractor) {
            if (lower_attr < 0.0) lower_attr = fp.c;
            upper_attr = fp.c;
        } else if (fp.kind == FixedPointKind::Repellor) {
            repellor = fp.c;
        }
    }
    if (repellor < 0.0)
        throw std::logic_error("mode_escape_time: low-temperature report lacks a repellor");

    const int n = params.n;
    const double start_c = from == FromAttractor::Lower ? lower_attr : upper_attr;
    const int start_level =
        std::min(n, static_cast<int>(std::lround(start_c * n)));
    const double threshold = repellor * n;

    ChainState state(SpinConfiguration::at_level(n, start_level), seed);
    const UpdateTable table(params);
    auto escaped = [&](int k) {
        return from == FromAttractor::Lower ? (k > threshold) : (k < threshold);
    };
    for (std::int64_t t = 1; t <= cap; ++t) {
        step_inplace(state, params, table);
        if (escaped(state.config.ones_count())) return {t, false, cap};
    }
    return {cap, true, cap};
}

}  // namespace vwergm
