#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vwergm/analysis.hpp"
#include "vwergm/dynamics.hpp"
#include "vwergm/model.hpp"

namespace vwergm {

enum class SweepKind { Mixing, Gap, Bottleneck, Coupling, BurnIn, Escape };

/// A sweep over system sizes at fixed interaction parameters. The seed of
/// row (n, replicate) is mix64(master_seed, mix64(n, replicate)), so the
/// table is independent of scheduling.
struct SweepSpec {
    SweepKind kind;
    double p;
    double alpha1;
    double alpha2;
    std::vector<int> n_values;        // strictly increasing
    int replicas = 1;                 // ignored by the deterministic kinds
    std::uint64_t master_seed = 1;
    std::int64_t cap = 1000000000;    // per-run step budget
    double burnin_start_c = 1.0;                        // BurnIn only
    std::optional<double> burnin_target;                // BurnIn only
    FromAttractor escape_from = FromAttractor::Lower;   // Escape only
    int threads = 1;
};

struct SweepRow {
    int n;
    int replicate;
    double value;
    bool censored;  // the per-run cap was hit; value is the cap (lower bound)
};

enum class FitModel { PowerLaw, NLogN, Exponential };

struct FitPoint {
    double n;
    double y;
    bool censored = false;
};

struct ScalingFit {
    FitModel model;
    double coefficient;       // multiplicative constant in the fitted law
    double exponent_or_rate;  // PowerLaw exponent / Exponential rate; 0 for NLogN
    double r_squared;
    int censored_excluded;    // points dropped from the fit
    bool censored_warning;    // true when any point was dropped
};

std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Least squares in the model's transformed coordinates: log-log for
/// PowerLaw, ratio y/(n log n) for NLogN, (n, log y) for Exponential.
/// Censored points are excluded; fewer than 3 usable points is an error.
ScalingFit fit_scaling(const std::vector<FitPoint>& points, FitModel model);

/// Mean of the non-censored values per n, ready for fitting; censored rows
/// mark the point censored if they are the majority.
std::vector<FitPoint> aggregate_mean(const std::vector<SweepRow>& rows);

struct PhaseExperimentConfig {
    std::vector<int> n_values;             // empty -> phase default
    int replicas = 0;                      // 0 -> phase default
    std::int64_t cap = 0;                  // 0 -> phase default
    std::uint64_t master_seed = 20260801;
    int threads = 1;
    std::optional<double> p, alpha1, alpha2;  // unset -> canonical parameters
};

/// Composite desk-scale experiment for one phase:
///  - High: exact mixing times and coupling times with an n log n fit,
///  - Low: spectral gaps and bottleneck ratios with exponential fits,
///  - Critical: burn-in times with a power-law fit (target exponent 1.5).
struct PhaseExperimentReport {
    Phase phase;
    double p, alpha1, alpha2;
    std::vector<SweepRow> mixing_rows, coupling_rows;       // High
    std::vector<SweepRow> gap_rows, bottleneck_rows;        // Low
    std::vector<SweepRow> burnin_rows;                      // Critical
    std::optional<ScalingFit> mixing_fit, coupling_fit;     // NLogN
    std::optional<ScalingFit> inverse_gap_fit, inverse_bottleneck_fit;  // Exponential
    std::optional<ScalingFit> burnin_fit;                   // PowerLaw
    double mixing_ratio_spread = 0.0;    // max/min of t_mix / (n log n)
    double coupling_ratio_spread = 0.0;  // max/min of mean tau / (n log n)
};

PhaseExperimentReport phase_experiment(Phase phase, const PhaseExperimentConfig& config = {});

const char* to_string(SweepKind kind);
const char* to_string(FitModel model);

}  // namespace vwergm
