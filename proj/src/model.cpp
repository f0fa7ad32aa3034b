#include "linewave/model.hpp"

#include <cmath>
#include <stdexcept>

namespace linewave {

Normalization Normalization::from_frequency(double f_hz) {
    if (!(f_hz > 0.0)) throw std::invalid_argument("frequency must be positive");
    Normalization n;
    n.k0 = 2.0 * pi * f_hz / c0_m_s;
    n.lambda0 = c0_m_s / f_hz;
    return n;
}

namespace {

bool near_zero(cplx v, double tol) { return std::abs(v) <= tol; }

}  // namespace

bool AdmittanceDyadic::is_isotropic(double tol) const {
    if (dispersion) return false;
    double scale = std::max({std::abs(yzz), std::abs(yxx), 1.0});
    return near_zero(yzx, tol * scale) && near_zero(yxz, tol * scale) &&
           near_zero(yzz - yxx, tol * scale);
}

bool AdmittanceDyadic::is_lossless(double tol) const {
    if (dispersion) return false;
    double scale = std::max({std::abs(yzz), std::abs(yxx), std::abs(yzx), std::abs(yxz), 1.0});
    return std::abs(yzz.real()) <= tol * scale && std::abs(yxx.real()) <= tol * scale &&
           std::abs(yzx.real()) <= tol * scale && std::abs(yxz.real()) <= tol * scale;
}

AdmittanceDyadic isotropic_admittance(cplx zbar) {
    if (zbar == cplx(0.0, 0.0))
        throw std::invalid_argument("PEC limit unsupported; use large finite admittance");
    AdmittanceDyadic y;
    y.yzz = 1.0 / zbar;
    y.yxx = y.yzz;
    return y;
}

AdmittanceDyadic axial_admittance(cplx zzz_bar, cplx zxx_bar) {
    if (zzz_bar == cplx(0.0, 0.0) || zxx_bar == cplx(0.0, 0.0))
        throw std::invalid_argument("PEC limit unsupported; use large finite admittance");
    AdmittanceDyadic y;
    y.yzz = 1.0 / zzz_bar;
    y.yxx = 1.0 / zxx_bar;
    return y;
}

AdmittanceDyadic admittance_from_impedance_entries(cplx zzz, cplx zzx, cplx zxz, cplx zxx) {
    cplx det = zzz * zxx - zzx * zxz;
    if (det == cplx(0.0, 0.0)) throw std::invalid_argument("singular impedance dyadic");
    AdmittanceDyadic y;
    y.yzz = zxx / det;
    y.yzx = -zzx / det;
    y.yxz = -zxz / det;
    y.yxx = zzz / det;
    return y;
}

AdmittanceDyadic rotated_axial_admittance(cplx zu_bar, cplx zv_bar, double xi) {
    if (zu_bar * zv_bar == cplx(0.0, 0.0))
        throw std::invalid_argument("singular impedance dyadic");
    double c = std::cos(xi), s = std::sin(xi);
    cplx zzz = zu_bar * c * c + zv_bar * s * s;
    cplx zxx = zu_bar * s * s + zv_bar * c * c;
    cplx zzx = (zu_bar - zv_bar) * c * s;
    return admittance_from_impedance_entries(zzz, zzx, zzx, zxx);
}

std::array<cplx, 4> impedance_entries(const AdmittanceDyadic& y) {
    cplx det = y.yzz * y.yxx - y.yzx * y.yxz;
    if (det == cplx(0.0, 0.0)) throw std::invalid_argument("singular admittance dyadic");
    return {y.yxx / det, -y.yzx / det, -y.yxz / det, y.yzz / det};
}

bool StructureSpec::zero_contrast(double tol) const {
    if (y1.dispersion || y2.dispersion) return false;
    double scale = std::max({std::abs(y1.yzz), std::abs(y1.yxx), std::abs(y2.yzz),
                             std::abs(y2.yxx), 1.0});
    return std::abs(y1.yzz - y2.yzz) <= tol * scale && std::abs(y1.yzx - y2.yzx) <= tol * scale &&
           std::abs(y1.yxz - y2.yxz) <= tol * scale && std::abs(y1.yxx - y2.yxx) <= tol * scale;
}

StructureSpec StructureSpec::mirrored() const {
    // x -> -x flips the sign of the zx/xz couplings and swaps the halves.
    auto flip = [](AdmittanceDyadic d) {
        d.yzx = -d.yzx;
        d.yxz = -d.yxz;
        if (d.dispersion) {
            auto inner = d.dispersion;
            d.dispersion = [inner](cplx kx, cplx kz) {
                auto e = inner(-kx, kz);
                return std::array<cplx, 4>{e[0], -e[1], -e[2], e[3]};
            };
        }
        return d;
    };
    return StructureSpec{flip(y2), flip(y1)};
}

}  // namespace linewave
