#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

#include "linewave/basis.hpp"
#include "linewave/kernel.hpp"
#include "linewave/quadrature.hpp"

namespace linewave {

// Block order inside the assembled matrix: rows/columns [0, n_x) carry the
// x-directed test/basis functions, [n_x, n_x+n_z) the z-directed ones.
enum class Block { XX = 0, XZ = 1, ZX = 2, ZZ = 3 };

struct MoMSystem {
    cplx kz_hat;
    BasisSpec basis;
    Sheet sheet = Sheet::Proper;
    StructureSpec structure;
    std::array<cplx, 4> kernel_inf{};  // {zz, zx, xz, xx} asymptotic kernel

    // Toeplitz generators per block, entry (m,n) = generator[d = m-n]; each
    // vector is indexed d + (cols-1).
    std::array<std::vector<cplx>, 4> generators;
    Eigen::MatrixXcd matrix;
    long integral_count = 0;  // distinct spectral generator integrals performed
    std::optional<double> cond_estimate;

    int rows_of(Block b) const;
    int cols_of(Block b) const;
    cplx generator(Block b, int d) const;
};

MoMSystem assemble(const StructureSpec& structure, cplx kz_hat, const BasisSpec& basis,
                   Sheet sheet, const QuadratureConfig& qcfg);

// Determinant of the row-max-scaled matrix; comparable across k̂z, zero at a
// mode.
cplx dispersion_residual(const MoMSystem& sys);

struct NullSpaceResult {
    std::vector<cplx> ix, iz;
    double sigma_min = 0.0;
    double sigma_ratio = 0.0;  // sigma_min / next-smallest singular value
    bool warning = false;      // "not at a root or degenerate mode"
};

// Smallest-singular-vector current coefficients. Finite Toeplitz sections of
// this system are persymmetric, which pairs every root with a spurious
// mirrored near-null direction; when the two smallest singular values are
// both well separated from the bulk the vector is taken from their span with
// minimal tail-coefficient energy (deflation), which restores pointwise
// convergence of the reconstructed current.
NullSpaceResult null_space_coefficients(const MoMSystem& sys);

}  // namespace linewave
