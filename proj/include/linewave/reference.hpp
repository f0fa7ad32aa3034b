#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "linewave/mom.hpp"

namespace linewave {
namespace reference {

// Slow, structurally independent re-implementations used to cross-check the
// production paths in tests and in the CLI self-test.

// Adaptive Gauss-Kronrod (G7, K15) on a finite interval.
cplx gk_integrate(const Integrand& f, double a, double b, double tol = 1e-10,
                  int max_depth = 18);

// Whole real line through the map k̂x = cot(θ), θ ∈ (0, π); extra_splits are
// abscissae in k̂x near which the adaptive rule should start subdivided.
cplx gk_real_line(const Integrand& f, double tol = 1e-10,
                  const std::vector<double>& extra_splits = {});

// Laguerre polynomial from explicit binomial coefficients, n <= 8.
cplx laguerre_explicit(int n, cplx u);

// Basis functions rebuilt from the explicit polynomials / literal powers.
cplx basis_spatial_oracle(int n, cplx a, double xhat);   // n-1 <= 8
cplx basis_spectral_oracle(int n, cplx a, cplx kx_hat);

// Green dyadic by direct 2x2 inversion of (W + Ȳ), W the upward free-space
// admittance dyadic, without the factored voltage formulas.
GreenDyadic green_oracle(const AdmittanceDyadic& y1, cplx kx_hat, cplx kz_hat, Sheet sheet);

enum class Polarization { TM, TE };

struct ClosedFormSw {
    Polarization pol;
    cplx k_sw;
};

// Surface wave of a uniform isotropic reactive sheet: TM sqrt(1 + X̄²) when
// inductive, TE sqrt(1 + 1/X̄²) when capacitive; nullopt if Z̄ is not purely
// reactive or X̄ = 0.
std::optional<ClosedFormSw> closed_form_sw(cplx zbar);

// Galerkin matrix with every entry integrated separately on the cot-mapped
// line: no Toeplitz reuse, no asymptote subtraction, no identity shortcut.
Eigen::MatrixXcd dense_assemble(const StructureSpec& structure, cplx kz_hat,
                                const BasisSpec& basis, Sheet sheet, double tol = 1e-9);

struct OracleEntry {
    std::string name;
    std::string digest;  // FNV-1a hash of the canonical input string
    cplx value{};
};

struct OracleReport {
    std::vector<OracleEntry> entries;
    void add(const std::string& name, const std::string& inputs, cplx value);
    const OracleEntry* find(const std::string& name) const;
};

std::string fnv1a_digest(const std::string& s);
void write_golden(const OracleReport& rep, const std::string& path);
OracleReport read_golden(const std::string& path);

}  // namespace reference
}  // namespace linewave
