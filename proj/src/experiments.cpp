#include "vwergm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include "vwergm/exactchain.hpp"

namespace vwergm {

namespace {

bool is_deterministic(SweepKind kind) {
    return kind == SweepKind::Mixing || kind == SweepKind::Gap || kind == SweepKind::Bottleneck;
}

SweepRow evaluate_row(const SweepSpec& spec, int n, int replicate) {
    const ModelParams params(n, spec.p, spec.alpha1, spec.alpha2);
    const std::uint64_t seed =
        mix64(spec.master_seed, mix64(static_cast<std::uint64_t>(n),
                                      static_cast<std::uint64_t>(replicate)));
    switch (spec.kind) {
        case SweepKind::Mixing: {
            const MagnetizationKernel kernel = build_kernel(params);
            const StationaryDistribution dist = stationary(params);
            try {
                const MixingReport report =
                    exact_mixing_time(kernel, dist, 0.25, MixingStarts::Extremes, spec.cap);
                return {n, replicate, static_cast<double>(report.t_mix), false};
            } catch (const CapExceededError&) {
                return {n, replicate, static_cast<double>(spec.cap), true};
            }
        }
        case SweepKind::Gap: {
            const SpectralReport report = spectral_gap(build_kernel(params), stationary(params));
            return {n, replicate, report.gap, false};
        }
        case SweepKind::Bottleneck: {
            const BottleneckReport report =
                bottleneck_ratio(build_kernel(params), stationary(params));
            return {n, replicate, report.phi_star, false};
        }
        case SweepKind::Coupling: {
            const CouplingRun run = coupling_time(params, seed, spec.cap);
            return {n, replicate, static_cast<double>(run.tau), run.timed_out};
        }
        case SweepKind::BurnIn: {
            const BurnInResult result =
                burn_in_time(params, spec.burnin_start_c, seed, spec.cap, spec.burnin_target);
            return {n, replicate, static_cast<double>(result.tau0), result.timed_out};
        }
        default: {
            const EscapeResult result = mode_escape_time(params, spec.escape_from, seed, spec.cap);
            return {n, replicate, static_cast<double>(result.t), result.timed_out};
        }
    }
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    if (spec.n_values.empty()) throw std::invalid_argument("run_sweep: n_values is empty");
    for (std::size_t i = 1; i < spec.n_values.size(); ++i)
        if (spec.n_values[i] <= spec.n_values[i - 1])
            throw std::invalid_argument("run_sweep: n_values must be strictly increasing");
    if (spec.replicas < 1) throw std::invalid_argument("run_sweep: replicas must be >= 1");

    const int replicas = is_deterministic(spec.kind) ? 1 : spec.replicas;
    struct Task {
        int n;
        int replicate;
    };
    std::vector<Task> tasks;
    for (int n : spec.n_values)
        for (int r = 0; r < replicas; ++r) tasks.push_back({n, r});

    std::vector<SweepRow> rows(tasks.size());
    const int threads = std::max(1, spec.threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i)
            rows[i] = evaluate_row(spec, tasks[i].n, tasks[i].replicate);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                rows[i] = evaluate_row(spec, tasks[i].n, tasks[i].replicate);
            }
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return rows;
}

ScalingFit fit_scaling(const std::vector<FitPoint>& points, FitModel model) {
    std::vector<FitPoint> usable;
    int censored = 0;
    for (const FitPoint& pt : points) {
        if (pt.censored) {
            ++censored;
            continue;
        }
        if (!(pt.n > 0.0) || !(pt.y > 0.0))
            throw std::invalid_argument("fit_scaling: points must have n > 0 and y > 0");
        usable.push_back(pt);
    }
    if (usable.size() < 3)
        throw std::invalid_argument("fit_scaling: fewer than 3 usable points");

    ScalingFit fit{model, 0.0, 0.0, 0.0, censored, censored > 0};

    auto linear_fit = [](const std::vector<double>& x, const std::vector<double>& y,
                         double* slope, double* intercept, double* r2) {
        const double m = static_cast<double>(x.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
        }
        *slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        *intercept = (sy - *slope * sx) / m;
        double ss_res = 0, ss_tot = 0;
        const double mean_y = sy / m;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double fit_y = *slope * x[i] + *intercept;
            ss_res += (y[i] - fit_y) * (y[i] - fit_y);
            ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
        }
        *r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    };

    if (model == FitModel::NLogN) {
        // Constancy of the ratio y / (n log n).
        double ratio_sum = 0.0;
        for (const FitPoint& pt : usable) ratio_sum += pt.y / (pt.n * std::log(pt.n));
        fit.coefficient = ratio_sum / static_cast<double>(usable.size());
        double ss_res = 0, ss_tot = 0, mean_y = 0;
        for (const FitPoint& pt : usable) mean_y += pt.y;
        mean_y /= static_cast<double>(usable.size());
        for (const FitPoint& pt : usable) {
            const double fit_y = fit.coefficient * pt.n * std::log(pt.n);
            ss_res += (pt.y - fit_y) * (pt.y - fit_y);
            ss_tot += (pt.y - mean_y) * (pt.y - mean_y);
        }
        fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
        return fit;
    }

    std::vector<double> x, y;
    for (const FitPoint& pt : usable) {
        x.push_back(model == FitModel::PowerLaw ? std::log(pt.n) : pt.n);
        y.push_back(std::log(pt.y));
    }
    double slope, intercept, r2;
    linear_fit(x, y, &slope, &intercept, &r2);
    fit.coefficient = std::exp(intercept);
    fit.exponent_or_rate = slope;
    fit.r_squared = r2;
    return fit;
}

std::vector<FitPoint> aggregate_mean(const std::vector<SweepRow>& rows) {
    std::map<int, std::pair<double, int>> sums;   // n -> (sum, count) of usable rows
    std::map<int, int> censored_counts;
    for (const SweepRow& row : rows) {
        if (row.censored) {
            ++censored_counts[row.n];
        } else {
            auto& slot = sums[row.n];
            slot.first += row.value;
            ++slot.second;
        }
        sums.try_emplace(row.n, 0.0, 0);
    }
    std::vector<FitPoint> points;
    for (const auto& [n, slot] : sums) {
        const int censored = censored_counts.count(n) ? censored_counts[n] : 0;
        if (slot.second == 0 || censored > slot.second)
            points.push_back({static_cast<double>(n), 0.0, true});
        else
            points.push_back({static_cast<double>(n), slot.first / slot.second, false});
    }
    return points;
}

PhaseExperimentReport phase_experiment(Phase phase, const PhaseExperimentConfig& config) {
    PhaseExperimentReport report;
    report.phase = phase;

    // Canonical parameter sets per phase; the critical one is the cbar=0.55
    // point of the critical curve.
    double p, a1, a2;
    std::vector<int> n_values;
    int replicas;
    std::int64_t cap;
    switch (phase) {
        case Phase::HighTemperature:
            p = 0.5, a1 = 0.5, a2 = 0.5;
            n_values = {100, 200, 400, 800};
            replicas = 100;
            cap = 10000000;
            break;
        case Phase::LowTemperature:
            p = 0.05, a1 = 6.0, a2 = 0.0;
            n_values = {30, 40, 50, 60, 70, 80, 90, 100, 110, 120};
            replicas = 1;
            cap = 10000000;
            break;
        default: {
            const CriticalPoint cp = critical_point(0.55);
            p = cp.p_c, a1 = cp.alpha1_c, a2 = cp.alpha2;
            n_values = {250, 500, 1000, 2000};
            replicas = 50;
            cap = 200000000;
            break;
        }
    }
    if (config.p) p = *config.p;
    if (config.alpha1) a1 = *config.alpha1;
    if (config.alpha2) a2 = *config.alpha2;
    if (!config.n_values.empty()) n_values = config.n_values;
    if (config.replicas > 0) replicas = config.replicas;
    if (config.cap > 0) cap = config.cap;
    report.p = p, report.alpha1 = a1, report.alpha2 = a2;

    const Phase actual = classify_phase(ModelParams(1, p, a1, a2)).phase;
    if (actual != phase)
        throw std::invalid_argument(std::string("phase_experiment: parameters classify as ") +
                                    to_string(actual) + ", not " + to_string(phase));

    SweepSpec spec{SweepKind::Mixing, p,   a1,  a2, n_values, replicas,
                   config.master_seed, cap, 1.0, std::nullopt, FromAttractor::Lower,
                   config.threads};

    auto ratio_spread = [](const std::vector<FitPoint>& points) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const FitPoint& pt : points) {
            if (pt.censored) continue;
            const double ratio = pt.y / (pt.n * std::log(pt.n));
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        return lo > 0.0 && std::isfinite(lo) ? hi / lo : 0.0;
    };

    switch (phase) {
        case Phase::HighTemperature: {
            spec.kind = SweepKind::Mixing;
            report.mixing_rows = run_sweep(spec);
            spec.kind = SweepKind::Coupling;
            report.coupling_rows = run_sweep(spec);
            const auto mixing_points = aggregate_mean(report.mixing_rows);
            const auto coupling_points = aggregate_mean(report.coupling_rows);
            report.mixing_fit = fit_scaling(mixing_points, FitModel::NLogN);
            report.coupling_fit = fit_scaling(coupling_points, FitModel::NLogN);
            report.mixing_ratio_spread = ratio_spread(mixing_points);
            report.coupling_ratio_spread = ratio_spread(coupling_points);
            break;
        }
        case Phase::LowTemperature: {
            spec.kind = SweepKind::Gap;
            report.gap_rows = run_sweep(spec);
            spec.kind = SweepKind::Bottleneck;
            report.bottleneck_rows = run_sweep(spec);
            auto inverted = [](std::vector<FitPoint> points) {
                for (FitPoint& pt : points)
                    if (!pt.censored) pt.y = 1.0 / pt.y;
                return points;
            };
            report.inverse_gap_fit =
                fit_scaling(inverted(aggregate_mean(report.gap_rows)), FitModel::Exponential);
            report.inverse_bottleneck_fit = fit_scaling(
                inverted(aggregate_mean(report.bottleneck_rows)), FitModel::Exponential);
            break;
        }
        default: {
            spec.kind = SweepKind::BurnIn;
            spec.burnin_start_c = 1.0;
            report.burnin_rows = run_sweep(spec);
            report.burnin_fit =
                fit_scaling(aggregate_mean(report.burnin_rows), FitModel::PowerLaw);
            break;
        }
    }
    return report;
}

const char* to_string(SweepKind kind) {
    switch (kind) {
        case SweepKind::Mixing: return "mixing";
        case SweepKind::Gap: return "gap";
        case SweepKind::Bottleneck: return "bottleneck";
        case SweepKind::Coupling: return "coupling";
        case SweepKind::BurnIn: return "burnin";
        default: return "escape";
    }
}

const char* to_string(FitModel model) {
    switch (model) {
        case FitModel::PowerLaw: return "power_law";
        case FitModel::NLogN: return "nlogn";
        default: return "exponential";
    }
}

}  // namespace vwergm
