#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "linewave/mom.hpp"

namespace linewave {

struct RootSearchConfig {
    cplx seed{};
    double window_beta = 0.2;   // search half-width along Re{k̂z}
    double window_alpha = 0.2;  // search half-width along -Im{k̂z}
    int pade_samples = 8;
    int pade_num = 3, pade_den = 3;
    double tol = 1e-10;
    int max_outer = 12;
    // Called with the new center after every outer step (and before
    // polishing); lets the caller refresh a ModeMatched basis coefficient.
    std::function<void(cplx)> on_outer_update;
};

struct RootReport {
    cplx root{};
    int outer_iterations = 0;
    int polish_iterations = 0;
    double residual_mag = std::numeric_limits<double>::quiet_NaN();
};

struct RootSearchError : std::runtime_error {
    RootSearchError(const std::string& msg, cplx best, double res)
        : std::runtime_error(msg), best_iterate(best), residual_mag(res) {}
    cplx best_iterate;
    double residual_mag;
};

using ResidualFn = std::function<cplx(cplx)>;

// Rational-interpolant (Padé) iteration on a circular stencil with Muller
// polishing. Throws RootSearchError("no root in window") when the interpolant
// has no zero within three windows of the seed, and
// RootSearchError("stagnation") when the centers stop improving.
RootReport find_root(const ResidualFn& residual, const RootSearchConfig& cfg);

// Bound-mode entry: brackets a sign change of the (real-on-axis) residual on
// the real segment [seed - wβ, seed + wβ] first, falling back to the complex
// search when no bracket exists or the residual is not real there.
RootReport find_root_bound(const ResidualFn& residual, const RootSearchConfig& cfg);

// Full single-structure pipeline: assemble/dispersion_residual with the
// requested basis strategy (ModeMatched coefficients refreshed every outer
// iteration), then the null-space quality at the converged root.
struct ModeSolveOptions {
    int n_x = 16, n_z = 16;
    BasisStrategy strategy = BasisStrategy::ModeMatched;
    cplx a_user{0.5, 0.0};
    Sheet sheet = Sheet::Proper;
    QuadratureConfig quad{};
    RootSearchConfig root{};
    bool bound_real_axis_first = false;
};

struct ModePoint {
    double param = 0.0;
    cplx kz_hat{};
    double sigma_min = std::numeric_limits<double>::quiet_NaN();
    double residual_mag = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
    bool ok() const { return status == "ok"; }
};

ModePoint solve_mode(const StructureSpec& structure, const ModeSolveOptions& opts);

// Same pipeline, additionally returning the converged basis and the
// null-space current coefficients for field reconstruction.
struct ModeSolveResult {
    ModePoint point;
    BasisSpec basis;
    std::vector<cplx> ix, iz;
};

ModeSolveResult solve_mode_full(const StructureSpec& structure, const ModeSolveOptions& opts);

// Parameter sweep with linear-extrapolation seeding; interior failures are
// recorded and the next point reseeds from the last success. A first-point
// failure aborts.
std::vector<ModePoint> sweep(const std::function<StructureSpec(double)>& family,
                             const std::vector<double>& grid, const ModeSolveOptions& opts);

}  // namespace linewave
