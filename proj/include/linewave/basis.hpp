#pragma once

#include "linewave/model.hpp"

namespace linewave {

enum class BasisStrategy { FixedHalf, ModeMatched, UserValue };

inline constexpr int max_basis_order = 64;

// Exponentially weighted Laguerre set Λ_n(x̂) = L_{n-1}(2a x̂) e^{-a x̂} on
// x̂ ≥ 0. The decay coefficient a (Re > 0) is either fixed at 1/2, matched to
// the current mode estimate as sqrt(k̂z²-1), or user supplied.
struct BasisSpec {
    int n_x = 0;
    int n_z = 0;
    cplx a{0.5, 0.0};
    BasisStrategy strategy = BasisStrategy::FixedHalf;

    static BasisSpec fixed_half(int n_x, int n_z);
    static BasisSpec mode_matched(int n_x, int n_z, cplx kz_hat);
    static BasisSpec user_value(int n_x, int n_z, cplx a);

    // ModeMatched refresh: a <- sqrt(k̂z²-1) with Re > 0; no-op otherwise.
    void refresh(cplx kz_hat);
};

// sqrt(k̂z²-1) on the branch with Re > 0.
cplx mode_matched_scale(cplx kz_hat);

// Λ_n(x̂), n ≥ 1.
cplx basis_spatial(int n, cplx a, double xhat);

// k0·Λ̃_n(k̂x) = j (k̂x - ja)^{n-1} / (k̂x + ja)^n, evaluated in ratio form so
// high orders neither overflow nor underflow.
cplx basis_spectral(int n, cplx a, cplx kx_hat);

// Closed form of ∫ k0Λ̃_m(-k̂x)·k0Λ̃_n(k̂x) dk̂x = (π/a)·δ_mn, valid for
// complex a with Re > 0 by analytic continuation.
cplx overlap_identity(int m, int n, cplx a);

}  // namespace linewave
