#include "linewave/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace linewave {

std::vector<double> SingularityCatalog::split_points(double proximity) const {
    std::vector<double> out;
    for (const Singularity& s : items)
        if (s.axis_distance < proximity) out.push_back(s.location.real());
    out.push_back(0.0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-9; }),
              out.end());
    return out;
}

double SingularityCatalog::min_axis_distance() const {
    double d = 1e300;
    for (const Singularity& s : items) d = std::min(d, s.axis_distance);
    return d;
}

SingularityCatalog build_catalog(const StructureSpec& structure, cplx kz_hat, cplx a,
                                 Sheet sheet) {
    SingularityCatalog cat;
    auto push_pair = [&](cplx loc, SingularityKind kind) {
        cat.items.push_back({loc, kind, std::abs(loc.imag())});
        cat.items.push_back({-loc, kind, std::abs(loc.imag())});
    };

    cplx kbp = std::sqrt(cplx(1.0, 0.0) - kz_hat * kz_hat);
    push_pair(kbp, SingularityKind::BranchPoint);

    for (cplx ksw : uniform_sw_wavenumbers(structure.y1)) {
        cplx kp = std::sqrt(ksw * ksw - kz_hat * kz_hat);
        push_pair(kp, SingularityKind::SwPole);
    }

    const cplx j(0.0, 1.0);
    push_pair(j * a, SingularityKind::BasisPole);
    (void)sheet;
    return cat;
}

KernelEvaluator KernelEvaluator::make(const StructureSpec& s, cplx kz_hat, cplx a,
                                      Sheet sheet, bool swap_sides) {
    KernelEvaluator ev;
    ev.structure = swap_sides ? s.mirrored() : s;
    ev.kz_hat = kz_hat;
    ev.sheet = sheet;
    ev.swap_sides = swap_sides;
    ev.catalog = build_catalog(ev.structure, kz_hat, a, sheet);
    return ev;
}

std::array<cplx, 4> KernelEvaluator::at(cplx kx_hat) const {
    for (const Singularity& s : catalog.items) {
        if (std::abs(kx_hat - s.location) < 1e-13) {
            const char* name = s.kind == SingularityKind::BranchPoint ? "branch point"
                               : s.kind == SingularityKind::SwPole    ? "surface-wave pole"
                                                                      : "basis pole";
            throw std::domain_error(std::string("kernel evaluated at a cataloged singularity: ") +
                                    name);
        }
    }
    const AdmittanceDyadic& y1 = structure.y1;
    const AdmittanceDyadic& y2 = structure.y2;
    auto e1 = y1.at(kx_hat, kz_hat);
    auto e2 = y2.at(kx_hat, kz_hat);
    cplx dzz = e2[0] - e1[0], dzx = e2[1] - e1[1];
    cplx dxz = e2[2] - e1[2], dxx = e2[3] - e1[3];
    GreenDyadic g = green_ee(y1, kx_hat, kz_hat, sheet);
    return {cplx(1.0, 0.0) - (dzz * g.gzz + dzx * g.gxz),
            -(dzz * g.gzx + dzx * g.gxx),
            -(dxz * g.gzz + dxx * g.gxz),
            cplx(1.0, 0.0) - (dxz * g.gzx + dxx * g.gxx)};
}

std::array<cplx, 4> KernelEvaluator::at_infinity() const {
    // Along the real axis G̃ee -> -(1/Ȳ₁xx) x̂x̂, so
    // K̃inf = I + (ΔȲ·x̂x̂)/Ȳ₁xx (column x only).
    auto e1 = structure.y1.at(cplx(0.0, 0.0), kz_hat);
    auto e2 = structure.y2.at(cplx(0.0, 0.0), kz_hat);
    cplx y1xx = e1[3];
    if (std::abs(y1xx) < 1e-12)
        return {cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(1.0, 0.0)};
    cplx dzx = e2[1] - e1[1];
    cplx dxx = e2[3] - e1[3];
    return {cplx(1.0, 0.0), dzx / y1xx, cplx(0.0, 0.0), cplx(1.0, 0.0) + dxx / y1xx};
}

}  // namespace linewave
