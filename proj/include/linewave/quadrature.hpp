#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "linewave/model.hpp"

namespace linewave {

struct QuadratureConfig {
    double rel_tol = 1e-10;
    int max_levels = 10;          // DE refinement depth (<= 14)
    double truncation = 10.0;     // half-width where the infinite tails begin
    double proximity_threshold = 0.5;  // axis distance forcing segmentation
};

struct QuadResult {
    cplx value{};
    double error_estimate = 0.0;  // magnitude of the last-level correction
    int levels = 0;
    bool converged = false;
};

struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& msg, cplx best, double err)
        : std::runtime_error(msg), best_estimate(best), error_bound(err) {}
    cplx best_estimate;
    double error_bound;
};

using Integrand = std::function<cplx(double)>;

// tanh-sinh rule on a finite interval.
QuadResult tanh_sinh(const Integrand& f, double a, double b, const QuadratureConfig& cfg);

// exp-sinh rule on [a, +inf) (direction=+1) or (-inf, a] (direction=-1).
QuadResult exp_sinh_tail(const Integrand& f, double a, int direction,
                         const QuadratureConfig& cfg);

// Whole real line: the interval [-truncation, truncation] is split at the
// supplied abscissae (real parts of near-axis singularities), each finite
// segment handled by tanh-sinh and the two tails by exp-sinh. Throws
// QuadratureError (carrying the best estimate) if any piece fails to reach
// rel_tol within max_levels.
QuadResult integrate_real_line(const Integrand& f, const QuadratureConfig& cfg,
                               const std::vector<double>& split_points = {});

// Variant for integrands carrying an oscillatory factor of known period in
// k̂x (inverse-transform kernels e^{-j k̂x x̂}, period 2π/|x̂|): panels are
// capped at ten periods and the integration is truncated at roughly fifty
// oscillations past the outermost split instead of running exp-sinh tails.
QuadResult integrate_real_line_oscillatory(const Integrand& f, const QuadratureConfig& cfg,
                                           const std::vector<double>& split_points,
                                           double period);

}  // namespace linewave
