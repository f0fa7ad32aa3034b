#include "linewave/green.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace linewave {

cplx vertical_wavenumber(cplx kt2_hat, Sheet sheet) {
    cplx s = std::sqrt(cplx(1.0, 0.0) - kt2_hat);
    if (s.imag() > 0.0) s = -s;
    if (s.imag() == 0.0 && s.real() < 0.0) s = -s;
    if (sheet == Sheet::Improper) s = -s;
    return s;
}

SpectralPoint make_spectral_point(cplx kx_hat, cplx kz_hat, Sheet sheet) {
    SpectralPoint p;
    p.kx_hat = kx_hat;
    p.kz_hat = kz_hat;
    p.kt2_hat = kz_hat * kz_hat + kx_hat * kx_hat;
    p.ky_hat = vertical_wavenumber(p.kt2_hat, sheet);
    p.sheet = sheet;
    return p;
}

UVAdmittance project_uv(const AdmittanceDyadic& y, cplx kx_hat, cplx kz_hat) {
    cplx kt2 = kz_hat * kz_hat + kx_hat * kx_hat;
    if (kt2 == cplx(0.0, 0.0))
        throw std::domain_error("on-axis spectral point; TM/TE basis undefined");
    auto [yzz, yzx, yxz, yxx] = y.at(kx_hat, kz_hat);
    cplx kz2 = kz_hat * kz_hat, kx2 = kx_hat * kx_hat, kzkx = kz_hat * kx_hat;
    UVAdmittance r;
    r.yuu = (kz2 * yzz + kzkx * (yzx + yxz) + kx2 * yxx) / kt2;
    r.yuv = (kz2 * yzx + kzkx * (yxx - yzz) - kx2 * yxz) / kt2;
    r.yvu = (kz2 * yxz + kzkx * (yxx - yzz) - kx2 * yzx) / kt2;
    r.yvv = (kz2 * yxx - kzkx * (yzx + yxz) + kx2 * yzz) / kt2;
    return r;
}

NetworkVoltages network_voltages(const UVAdmittance& y, cplx ky_hat) {
    if (ky_hat == cplx(0.0, 0.0))
        throw std::domain_error("branch point: vertical wavenumber is zero");
    // Scale by k̂y so no bare 1/k̂y appears: dets = k̂y·det stays finite near the
    // branch point.
    cplx dets = (y.yuu * ky_hat + 1.0) * (y.yvv + ky_hat) - ky_hat * y.yuv * y.yvu;
    NetworkVoltages v;
    v.v_tm_tm = ky_hat * (y.yvv + ky_hat) / dets;
    v.v_te_tm = -ky_hat * y.yuv / dets;
    v.v_tm_te = -ky_hat * y.yvu / dets;
    v.v_te_te = (y.yuu * ky_hat + 1.0) / dets;
    v.det = dets / ky_hat;
    v.resonance = std::abs(v.det) < resonance_floor;
    return v;
}

GreenDyadic green_ee(const AdmittanceDyadic& y1, cplx kx_hat, cplx kz_hat, Sheet sheet) {
    SpectralPoint p = make_spectral_point(kx_hat, kz_hat, sheet);
    UVAdmittance yuv = project_uv(y1, kx_hat, kz_hat);
    NetworkVoltages v = network_voltages(yuv, p.ky_hat);
    cplx kz2 = kz_hat * kz_hat, kx2 = kx_hat * kx_hat, kzkx = kz_hat * kx_hat;
    cplx kt2 = p.kt2_hat;
    GreenDyadic g;
    g.gzz = -(kz2 * v.v_tm_tm - kzkx * (v.v_te_tm + v.v_tm_te) + kx2 * v.v_te_te) / kt2;
    g.gzx = -(kz2 * v.v_te_tm + kzkx * (v.v_tm_tm - v.v_te_te) - kx2 * v.v_tm_te) / kt2;
    g.gxz = -(kz2 * v.v_tm_te + kzkx * (v.v_tm_tm - v.v_te_te) - kx2 * v.v_te_tm) / kt2;
    g.gxx = -(kx2 * v.v_tm_tm + kzkx * (v.v_te_tm + v.v_tm_te) + kz2 * v.v_te_te) / kt2;
    g.resonance = v.resonance;
    return g;
}

namespace {

// det of the loaded network as a function of k̂t for propagation along the
// surface (direction fixed by the caller through kz/kx split).
cplx network_det_kt(const AdmittanceDyadic& y, cplx kt, bool along_z) {
    cplx kz = along_z ? kt : cplx(1e-9, 0.0);
    cplx kx = along_z ? cplx(0.0, 0.0) : kt;
    cplx ky = vertical_wavenumber(kz * kz + kx * kx, Sheet::Proper);
    UVAdmittance p = project_uv(y, kx, kz);
    return (p.yuu * ky + 1.0) * (p.yvv + ky) - ky * p.yuv * p.yvu;
}

cplx muller_kt(const AdmittanceDyadic& y, bool along_z, cplx seed) {
    auto f = [&](cplx kt) { return network_det_kt(y, kt, along_z); };
    cplx z0 = seed * 0.999, z1 = seed * 1.001, z2 = seed;
    cplx f0 = f(z0), f1 = f(z1), f2 = f(z2);
    for (int it = 0; it < 60; ++it) {
        cplx q = (z2 - z1) / (z1 - z0);
        cplx a = q * f2 - q * (1.0 + q) * f1 + q * q * f0;
        cplx b = (2.0 * q + 1.0) * f2 - (1.0 + q) * (1.0 + q) * f1 + q * q * f0;
        cplx c = (1.0 + q) * f2;
        cplx disc = std::sqrt(b * b - 4.0 * a * c);
        cplx den = (std::abs(b + disc) > std::abs(b - disc)) ? b + disc : b - disc;
        if (den == cplx(0.0, 0.0)) break;
        cplx dz = -(z2 - z1) * 2.0 * c / den;
        z0 = z1;
        f0 = f1;
        z1 = z2;
        f1 = f2;
        z2 = z2 + dz;
        f2 = f(z2);
        if (std::abs(dz) < 1e-12 * std::max(1.0, std::abs(z2))) break;
    }
    return z2;
}

void push_unique(std::vector<cplx>& out, cplx v) {
    if (!(v.real() > 1.0)) return;          // surface waves are slow waves
    if (std::abs(v.imag()) > 10.0) return;  // reject wildly damped artifacts
    for (cplx u : out)
        if (std::abs(u - v) < 1e-8 * std::max(1.0, std::abs(u))) return;
    out.push_back(v);
}

}  // namespace

std::vector<cplx> uniform_sw_wavenumbers(const AdmittanceDyadic& y) {
    std::vector<cplx> roots;
    if (y.is_isotropic() && y.is_lossless()) {
        // Scalar reactive surface Z̄ = jX̄: TM wave on inductive sheets
        // (k̂ = sqrt(1+X̄²)), TE on capacitive (k̂ = sqrt(1+1/X̄²)).
        cplx zbar = impedance_entries(y)[0];
        double x = zbar.imag();
        if (x > 0.0) roots.push_back(std::sqrt(cplx(1.0 + x * x, 0.0)));
        if (x < 0.0) roots.push_back(std::sqrt(cplx(1.0 + 1.0 / (x * x), 0.0)));
        return roots;
    }

    // Seeds: closed forms of the diagonal impedance entries plus a coarse scan.
    std::vector<cplx> seeds;
    auto add_scalar_seeds = [&](cplx zbar) {
        double x = zbar.imag();
        if (x > 1e-12) seeds.push_back(std::sqrt(cplx(1.0 + x * x, 0.0)));
        if (x < -1e-12) seeds.push_back(std::sqrt(cplx(1.0 + 1.0 / (x * x), 0.0)));
    };
    try {
        auto z = impedance_entries(y);
        add_scalar_seeds(z[0]);
        add_scalar_seeds(z[3]);
    } catch (const std::invalid_argument&) {
    }
    for (double s = 1.05; s < 5.0; s += 0.25) seeds.push_back(cplx(s, 0.0));

    for (bool along_z : {true, false}) {
        for (cplx seed : seeds) {
            cplx r = muller_kt(y, along_z, seed);
            if (std::abs(network_det_kt(y, r, along_z)) < 1e-9)
                push_unique(roots, r.real() >= 0.0 ? r : -r);
        }
    }
    std::sort(roots.begin(), roots.end(),
              [](cplx a, cplx b) { return a.real() < b.real(); });
    return roots;
}

}  // namespace linewave
