#include "linewave/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace linewave {

namespace {

void check_order(int n) {
    if (n < 1 || n > max_basis_order)
        throw std::invalid_argument("basis order out of range [1, 64]");
}

void check_scale(cplx a) {
    if (!(a.real() > 0.0))
        throw std::invalid_argument("basis coefficient requires Re{a} > 0");
}

}  // namespace

cplx mode_matched_scale(cplx kz_hat) {
    cplx a = std::sqrt(kz_hat * kz_hat - 1.0);
    if (a.real() < 0.0) a = -a;
    return a;
}

BasisSpec BasisSpec::fixed_half(int n_x, int n_z) {
    check_order(n_x);
    check_order(n_z);
    return BasisSpec{n_x, n_z, cplx(0.5, 0.0), BasisStrategy::FixedHalf};
}

BasisSpec BasisSpec::mode_matched(int n_x, int n_z, cplx kz_hat) {
    check_order(n_x);
    check_order(n_z);
    BasisSpec b{n_x, n_z, mode_matched_scale(kz_hat), BasisStrategy::ModeMatched};
    check_scale(b.a);
    return b;
}

BasisSpec BasisSpec::user_value(int n_x, int n_z, cplx a) {
    check_order(n_x);
    check_order(n_z);
    check_scale(a);
    return BasisSpec{n_x, n_z, a, BasisStrategy::UserValue};
}

void BasisSpec::refresh(cplx kz_hat) {
    if (strategy == BasisStrategy::ModeMatched) a = mode_matched_scale(kz_hat);
}

cplx basis_spatial(int n, cplx a, double xhat) {
    check_order(n);
    check_scale(a);
    if (xhat < 0.0) throw std::domain_error("basis supported on x >= 0 only");
    cplx u = 2.0 * a * xhat;
    cplx lkm1(0.0, 0.0), lk(1.0, 0.0);  // L_0 = 1
    for (int k = 0; k < n - 1; ++k) {
        cplx lkp1 = ((cplx(2.0 * k + 1.0) - u) * lk - cplx(double(k)) * lkm1) / cplx(k + 1.0);
        lkm1 = lk;
        lk = lkp1;
    }
    return lk * std::exp(-a * xhat);
}

cplx basis_spectral(int n, cplx a, cplx kx_hat) {
    check_order(n);
    check_scale(a);
    const cplx j(0.0, 1.0);
    cplx den = kx_hat + j * a;
    if (std::abs(den) < 1e-300)
        throw std::domain_error("spectral basis evaluated at its pole kx = -ja");
    cplx w = (kx_hat - j * a) / den;
    cplx v = j / den;
    for (int k = 0; k < n - 1; ++k) v *= w;
    return v;
}

cplx overlap_identity(int m, int n, cplx a) {
    check_order(m);
    check_order(n);
    check_scale(a);
    if (m != n) return cplx(0.0, 0.0);
    return pi / a;
}

}  // namespace linewave
