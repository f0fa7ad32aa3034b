#pragma once

#include <array>
#include <complex>
#include <functional>

namespace linewave {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double eta0_ohms = 376.730313668;
inline constexpr double c0_m_s = 299792458.0;

// Everything internal is dimensionless: wavenumbers divided by k0, impedances
// by eta0, admittances multiplied by eta0. Normalization converts at the I/O
// boundary only.
struct Normalization {
    double k0 = 0.0;       // rad/m
    double eta0 = eta0_ohms;
    double lambda0 = 0.0;  // m

    static Normalization from_frequency(double f_hz);

    double xhat_from_meters(double x_m) const { return k0 * x_m; }
    double meters_from_xhat(double xhat) const { return xhat / k0; }
    cplx normalize_impedance(cplx z_ohms) const { return z_ohms / eta0; }
    cplx normalize_admittance(cplx y_siemens) const { return y_siemens * eta0; }
};

// Riemann sheet of k̂y = sqrt(1 - k̂t²).
enum class Sheet { Proper, Improper };

struct SheetWavenumber {
    cplx kz_hat;
    Sheet sheet = Sheet::Proper;
};

// 2x2 normalized surface admittance in (z,x) Cartesian components.
// `dispersion`, when set, supplies wavenumber-dependent entries
// {yzz, yzx, yxz, yxx} as a function of (kx_hat, kz_hat); the stored constants
// are used otherwise.
struct AdmittanceDyadic {
    cplx yzz{}, yzx{}, yxz{}, yxx{};
    std::function<std::array<cplx, 4>(cplx kx_hat, cplx kz_hat)> dispersion;

    std::array<cplx, 4> at(cplx kx_hat, cplx kz_hat) const {
        if (dispersion) return dispersion(kx_hat, kz_hat);
        return {yzz, yzx, yxz, yxx};
    }
    bool is_constant() const { return !dispersion; }
    bool is_isotropic(double tol = 1e-14) const;
    bool is_lossless(double tol = 1e-12) const;  // purely reactive entries
};

AdmittanceDyadic isotropic_admittance(cplx zbar);
AdmittanceDyadic axial_admittance(cplx zzz_bar, cplx zxx_bar);
// Impedance dyadic zu·ûû + zv·v̂v̂ with û = cosξ ẑ + sinξ x̂,
// v̂ = −sinξ ẑ + cosξ x̂, inverted to an admittance in (z,x).
AdmittanceDyadic rotated_axial_admittance(cplx zu_bar, cplx zv_bar, double xi);
AdmittanceDyadic admittance_from_impedance_entries(cplx zzz, cplx zzx, cplx zxz, cplx zxx);

// Inverse of the (constant) dyadic, returned as {zzz, zzx, zxz, zxx}.
std::array<cplx, 4> impedance_entries(const AdmittanceDyadic& y);

// y1 governs x<0, y2 governs x>0.
struct StructureSpec {
    AdmittanceDyadic y1;
    AdmittanceDyadic y2;

    bool zero_contrast(double tol = 1e-14) const;
    StructureSpec mirrored() const;  // swap halves (x -> -x)
};

}  // namespace linewave
