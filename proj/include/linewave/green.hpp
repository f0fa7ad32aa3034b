#pragma once

#include <vector>

#include "linewave/model.hpp"

namespace linewave {

struct SpectralPoint {
    cplx kx_hat, kz_hat, kt2_hat, ky_hat;
    Sheet sheet = Sheet::Proper;
};

SpectralPoint make_spectral_point(cplx kx_hat, cplx kz_hat, Sheet sheet);

// k̂y = sqrt(1 - k̂t²) on the requested sheet: Im ≤ 0 on Proper, Im ≥ 0 on
// Improper; ties (Im == 0) resolved toward Re ≥ 0.
cplx vertical_wavenumber(cplx kt2_hat, Sheet sheet);

// Admittance dyadic projected on the spectral TM/TE unit vectors
// û = (k̂z ẑ + k̂x x̂)/k̂t, v̂ = ŷ × û.
struct UVAdmittance {
    cplx yuu, yuv, yvu, yvv;
};

UVAdmittance project_uv(const AdmittanceDyadic& y, cplx kx_hat, cplx kz_hat);

// Transverse-network voltage responses at the boundary for unit TM/TE current
// sources; v_<src>_<obs> notation (v_te_tm = TM voltage due to a TE source).
struct NetworkVoltages {
    cplx v_tm_tm, v_te_tm, v_tm_te, v_te_te;
    cplx det;        // (yuu + 1/k̂y)(yvv + k̂y) - yuv·yvu
    bool resonance;  // |det| below the surface-wave resonance floor
};

NetworkVoltages network_voltages(const UVAdmittance& y, cplx ky_hat);

// Tangential electric-field spectral Green's dyadic at y = y' = 0 for a plane
// with uniform admittance y1, in (z,x) components, normalized by eta0.
struct GreenDyadic {
    cplx gzz, gzx, gxz, gxx;
    bool resonance = false;
};

GreenDyadic green_ee(const AdmittanceDyadic& y1, cplx kx_hat, cplx kz_hat, Sheet sheet);

// Surface-wave wavenumbers k̂_SW of the uniform plane with admittance y:
// proper-sheet zeros of the network determinant in k̂t with Re > 0. Isotropic
// lossless surfaces use the closed forms; otherwise a Muller search seeded
// from the closed forms of the diagonal entries plus a coarse scan.
std::vector<cplx> uniform_sw_wavenumbers(const AdmittanceDyadic& y);

inline constexpr double resonance_floor = 1e-14;

}  // namespace linewave
