#pragma once

#include <array>
#include <string>
#include <vector>

#include "linewave/green.hpp"
#include "linewave/model.hpp"

namespace linewave {

enum class SingularityKind { BranchPoint, SwPole, BasisPole };

struct Singularity {
    cplx location;  // in the complex k̂x plane
    SingularityKind kind;
    double axis_distance;  // |Im location|
};

struct SingularityCatalog {
    std::vector<Singularity> items;

    // Real parts of the singularities lying within `proximity` of the real
    // axis; used by the quadrature to place segment boundaries.
    std::vector<double> split_points(double proximity) const;
    double min_axis_distance() const;
};

// Integrand singularities of the spectral system for a given k̂z: branch
// points ±sqrt(1-k̂z²), surface-wave poles ±sqrt(k̂_SW²-k̂z²) for each SW of
// the extended half-plane's admittance, and the basis-spectrum poles ±ja.
SingularityCatalog build_catalog(const StructureSpec& structure, cplx kz_hat, cplx a,
                                 Sheet sheet = Sheet::Proper);

// 2x2 kernel K̃ = I - (Ȳ₂-Ȳ₁)·G̃ee of the junction integral equation, with
// the Ȳ₁ half-plane extended under the strip current. Entries ordered
// {zz, zx, xz, xx}.
struct KernelEvaluator {
    StructureSpec structure;
    cplx kz_hat;
    Sheet sheet = Sheet::Proper;
    bool swap_sides = false;  // extend Ȳ₂ instead (mirrored equivalence)
    SingularityCatalog catalog;

    static KernelEvaluator make(const StructureSpec& s, cplx kz_hat, cplx a,
                                Sheet sheet = Sheet::Proper, bool swap_sides = false);

    std::array<cplx, 4> at(cplx kx_hat) const;
    // |k̂x| -> inf limit along the real axis (constant; the xx entry does not
    // tend to 1 because the xx Green entry tends to -1/Ȳ₁xx, not 0).
    std::array<cplx, 4> at_infinity() const;

    const AdmittanceDyadic& extended() const { return swap_sides ? structure.y2 : structure.y1; }
    const AdmittanceDyadic& other() const { return swap_sides ? structure.y1 : structure.y2; }
};

}  // namespace linewave
