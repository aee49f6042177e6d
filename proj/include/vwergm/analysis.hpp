#pragma once

#include <string>
#include <vector>

#include "vwergm/model.hpp"

namespace vwergm {

enum class FixedPointKind { Attractor, Repellor, Inflection };

/// A root of lambda(c) = c together with the slope that classifies it.
struct FixedPoint {
    double c;
    double lambda_prime;
    FixedPointKind kind;
};

enum class Phase { HighTemperature, LowTemperature, Degenerate };

struct PhaseReport {
    std::vector<FixedPoint> fixed_points;  // ascending in c
    Phase phase;
};

/// Point on the critical curve, parameterized by the inflection location
/// cbar in [1/2, 2/3]. All three parameter values are closed forms of cbar.
struct CriticalPoint {
    double cbar;
    double p_c;
    double alpha1_c;
    double alpha2;
};

/// Residuals of the criticality identities at a CriticalPoint.
struct CriticalityReport {
    double fixed_point_residual;        // lambda(cbar) - cbar
    double slope_residual;              // lambda'(cbar) - 1
    double second_derivative;           // lambda''(cbar)
    double third_derivative;            // lambda'''(cbar)
    double third_derivative_closed;     // (-6 cbar^2 + 6 cbar - 2) / (cbar (1-cbar))^2
    bool pass;
    std::vector<std::string> failures;  // offending identities, if any
};

/// One p-slice of the two-maximizer region boundary at fixed alpha2.
/// When valid, alpha1 in (alpha1_lower, alpha1_upper) gives two local
/// maximizers of the free energy.
struct BoundarySample {
    double p;
    double alpha1_lower;  // curve m(b(p))
    double alpha1_upper;  // curve m(a(p))
    bool valid;
};

struct PhaseDiagramRow {
    double p;
    double alpha1;
    Phase phase;
    int fixed_point_count;
};

/// All roots of phi' in (0,1) (equivalently fixed points of lambda), found
/// by splitting (0,1) at the roots of phi'' and bisecting each monotone
/// piece. Between 1 and 3 roots, ascending.
std::vector<FixedPoint> find_fixed_points(const ModelParams& params);

PhaseReport classify_phase(const ModelParams& params);

/// Closed-form (p_c, alpha1_c, alpha2) for cbar in [1/2, 2/3].
CriticalPoint critical_point(double cbar);

/// Checks lambda(cbar)=cbar, lambda'(cbar)=1, lambda''(cbar)=0 (all to
/// 1e-9) and lambda'''(cbar) <= -8 + 1e-9 at the critical parameters.
CriticalityReport verify_criticality(const CriticalPoint& cp);

/// Signs of lambda'' over the grid: +1 / -1, or 0 when |lambda''| <= 1e-12.
std::vector<int> second_derivative_sign_profile(const ModelParams& params,
                                                const std::vector<double>& grid);

/// Boundary alpha1 values of the V-shaped two-maximizer region for the
/// given alpha2 slice at prior p; valid=false when p exceeds the slice's
/// corner p_c.
BoundarySample v_region_boundary(double alpha2, double p);

/// Phase classification over a (p, alpha1) grid at fixed alpha2, row-major
/// with p outermost.
std::vector<PhaseDiagramRow> phase_diagram_scan(double alpha2,
                                                const std::vector<double>& p_grid,
                                                const std::vector<double>& alpha1_grid);

const char* to_string(FixedPointKind kind);
const char* to_string(Phase phase);

}  // namespace vwergm
