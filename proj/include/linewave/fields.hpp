#pragma once

#include <limits>
#include <vector>

#include "linewave/rootfind.hpp"

namespace linewave {

// Converged mode: wavenumber, basis, and the current coefficients on x̂ > 0.
struct ModeSolution {
    StructureSpec structure;
    cplx kz_hat{};
    Sheet sheet = Sheet::Proper;
    BasisSpec basis;
    std::vector<cplx> ix, iz;
};

ModeSolution make_mode_solution(const StructureSpec& structure, const ModeSolveResult& res,
                                Sheet sheet = Sheet::Proper);

struct CurrentSample {
    double xhat = 0.0;
    cplx j_sx{}, j_sz{};
};

// Synthesized strip current; identically zero for x̂ < 0.
std::vector<CurrentSample> current_profile(const ModeSolution& sol,
                                           const std::vector<double>& xhat);

struct FieldSample {
    double x_over_lambda0 = 0.0;
    cplx e_x{}, e_z{}, j_sx{}, j_sz{};
    bool ok = true;
};

// Every e and j entry is divided by norm_factor (the raw e_z just inside the
// strip), so e_z(0+) = 1 when normalized.
struct FieldTable {
    std::vector<FieldSample> samples;
    cplx norm_factor{1.0, 0.0};
    bool normalized = false;
};

struct FieldConfig {
    QuadratureConfig quad{};
    int threads = 1;
    double y_over_lambda0 = 0.0;  // only the surface plane y = 0 is supported
};

// Tangential electric field on the surface via the inverse transform of the
// spectral Green's function applied to the mode current, with the
// non-decaying x̂x̂ asymptote handled in closed form (it contributes the
// field jump on the strip side only). x values are in free-space wavelengths.
FieldTable tangential_field(const ModeSolution& sol, const std::vector<double>& x_over_lambda0,
                            const FieldConfig& cfg = {});

struct DecayFit {
    double rate = std::numeric_limits<double>::quiet_NaN();  // per unit x̂
    double window_lo = std::numeric_limits<double>::quiet_NaN();  // |x|/λ0
    double window_hi = std::numeric_limits<double>::quiet_NaN();
    int samples = 0;
    bool ok = false;
};

struct DiagnosticsReport {
    bool all_nan = false;  // zero-coefficient solution, nothing to report
    cplx jump_ratio{};     // e_x(+1e-3 λ0) / e_x(-1e-3 λ0)
    double ez_gap = std::numeric_limits<double>::quiet_NaN();  // |Δe_z| at ±1e-4 λ0
    double max_near_edge = std::numeric_limits<double>::quiet_NaN();
    bool finite_near_edge = false;
    DecayFit decay_pos, decay_neg;
    double phase_slope = std::numeric_limits<double>::quiet_NaN();  // d arg e_z / d x̂
    double phase_r2 = std::numeric_limits<double>::quiet_NaN();
    // Largest median deviation of arg(e_x/e_z) from ±90°, per side, degrees.
    double quadrature_dev_deg = std::numeric_limits<double>::quiet_NaN();
};

// Edge probes are evaluated directly (same normalization as the table); the
// decay fits use the table samples, restricted to the widest window inside
// |x|/λ0 ∈ (0.25, 3] on which |e| decreases monotonically and stays above
// the numerical floor, preferring (1, 3].
DiagnosticsReport diagnostics(const ModeSolution& sol, const FieldTable& table,
                              const FieldConfig& cfg = {});

// Relative L² mismatch between the admittance-contrast relation applied to
// the reconstructed field and the synthesized current over x/λ0 ∈ (0.05, 2).
double current_field_consistency(const ModeSolution& sol, const FieldTable& table);

}  // namespace linewave
