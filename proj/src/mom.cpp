#include "linewave/mom.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace linewave {

namespace {

struct KernelCache {
    const KernelEvaluator& ev;
    std::unordered_map<uint64_t, std::array<cplx, 4>> map;

    const std::array<cplx, 4>& at(double kx) {
        uint64_t key = std::bit_cast<uint64_t>(kx);
        auto it = map.find(key);
        if (it != map.end()) return it->second;
        return map.emplace(key, ev.at(cplx(kx, 0.0))).first->second;
    }
};

int block_kernel_index(Block b) {
    switch (b) {
        case Block::XX: return 3;
        case Block::XZ: return 2;
        case Block::ZX: return 1;
        default: return 0;
    }
}

}  // namespace

int MoMSystem::rows_of(Block b) const {
    return (b == Block::XX || b == Block::XZ) ? basis.n_x : basis.n_z;
}

int MoMSystem::cols_of(Block b) const {
    return (b == Block::XX || b == Block::ZX) ? basis.n_x : basis.n_z;
}

cplx MoMSystem::generator(Block b, int d) const {
    const auto& g = generators[size_t(b)];
    int idx = d + cols_of(b) - 1;
    if (idx < 0 || idx >= int(g.size())) throw std::out_of_range("generator offset");
    return g[idx];
}

MoMSystem assemble(const StructureSpec& structure, cplx kz_hat, const BasisSpec& basis,
                   Sheet sheet, const QuadratureConfig& qcfg) {
    if (structure.zero_contrast())
        throw std::invalid_argument("degenerate structure: no line discontinuity");

    MoMSystem sys;
    sys.kz_hat = kz_hat;
    sys.basis = basis;
    sys.sheet = sheet;
    sys.structure = structure;

    KernelEvaluator ev = KernelEvaluator::make(structure, kz_hat, basis.a, sheet);
    sys.kernel_inf = ev.at_infinity();
    KernelCache cache{ev, {}};

    QuadratureConfig cfg = qcfg;
    cfg.truncation = std::max(qcfg.truncation, 2.5 * (std::abs(kz_hat) + std::abs(basis.a)));
    std::vector<double> splits = ev.catalog.split_points(cfg.proximity_threshold);

    const cplx j(0.0, 1.0);
    const cplx a = basis.a;
    const cplx ja = j * a;
    const cplx a2 = a * a;

    auto generator_integral = [&](int kidx, int d) {
        cplx kinf = sys.kernel_inf[size_t(kidx)];
        Integrand f = [&, kidx, d, kinf](double kx) {
            const auto& k = cache.at(kx);
            cplx w = (kx + ja) / (kx - ja);
            cplx wd = (d >= 0) ? std::pow(w, d) : std::pow(1.0 / w, -d);
            return (k[size_t(kidx)] - kinf) * wd / (kx * kx + a2);
        };
        cplx val;
        try {
            val = integrate_real_line(f, cfg, splits).value;
        } catch (const QuadratureError& e) {
            throw QuadratureError("generator integral failed (kernel entry " +
                                      std::to_string(kidx) + ", offset " + std::to_string(d) +
                                      "): " + e.what(),
                                  e.best_estimate, e.error_bound);
        }
        ++sys.integral_count;
        if (d == 0) val += (pi / a) * kinf;
        return val / (2.0 * pi);
    };

    int nx = basis.n_x, nz = basis.n_z;
    bool isotropic = structure.y1.is_isotropic() && structure.y2.is_isotropic();

    auto& gen = sys.generators;
    for (Block b : {Block::XX, Block::XZ, Block::ZX, Block::ZZ}) {
        int rows = sys.rows_of(b), cols = sys.cols_of(b);
        gen[size_t(b)].assign(size_t(rows + cols - 1), cplx{});
    }
    auto put = [&](Block b, int d, cplx v) {
        gen[size_t(b)][size_t(d + sys.cols_of(b) - 1)] = v;
    };

    if (isotropic) {
        // Diagonal-block generators are even in d, cross-block ones odd with
        // the zx and xz kernels equal, so N_x + N_z + max{N_x, N_z} distinct
        // integrals suffice.
        for (int d = 0; d < nx; ++d) {
            cplx v = generator_integral(block_kernel_index(Block::XX), d);
            put(Block::XX, d, v);
            if (d > 0) put(Block::XX, -d, v);
        }
        for (int d = 0; d < nz; ++d) {
            cplx v = generator_integral(block_kernel_index(Block::ZZ), d);
            put(Block::ZZ, d, v);
            if (d > 0) put(Block::ZZ, -d, v);
        }
        int dmax = std::max(nx, nz);
        for (int d = 0; d < dmax; ++d) {
            cplx v = generator_integral(block_kernel_index(Block::ZX), d);
            if (d <= nz - 1) put(Block::ZX, d, v);
            if (d > 0 && d <= nx - 1) put(Block::ZX, -d, -v);
            if (d <= nx - 1) put(Block::XZ, d, v);
            if (d > 0 && d <= nz - 1) put(Block::XZ, -d, -v);
        }
    } else {
        for (Block b : {Block::XX, Block::XZ, Block::ZX, Block::ZZ}) {
            int rows = sys.rows_of(b), cols = sys.cols_of(b);
            for (int d = -(cols - 1); d <= rows - 1; ++d)
                put(b, d, generator_integral(block_kernel_index(b), d));
        }
    }

    int n = nx + nz;
    sys.matrix.resize(n, n);
    auto fill = [&](Block b, int row0, int col0) {
        for (int m = 0; m < sys.rows_of(b); ++m)
            for (int c = 0; c < sys.cols_of(b); ++c)
                sys.matrix(row0 + m, col0 + c) = sys.generator(b, m - c);
    };
    fill(Block::XX, 0, 0);
    fill(Block::XZ, 0, nx);
    fill(Block::ZX, nx, 0);
    fill(Block::ZZ, nx, nx);
    return sys;
}

namespace {

Eigen::MatrixXcd row_scaled(const MoMSystem& sys) {
    Eigen::MatrixXcd m = sys.matrix;
    for (int i = 0; i < m.rows(); ++i) {
        double s = m.row(i).cwiseAbs().maxCoeff();
        if (s > 0.0) m.row(i) /= s;
    }
    return m;
}

}  // namespace

cplx dispersion_residual(const MoMSystem& sys) {
    Eigen::MatrixXcd m = row_scaled(sys);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    double logmag = 0.0;
    cplx phase(1.0, 0.0);
    auto diag = lu.matrixLU().diagonal();
    for (int i = 0; i < diag.size(); ++i) {
        double mag = std::abs(diag(i));
        if (mag == 0.0) return cplx(0.0, 0.0);
        logmag += std::log(mag);
        phase *= diag(i) / mag;
    }
    int sign = lu.permutationP().determinant();
    logmag = std::clamp(logmag, -600.0, 600.0);
    return double(sign) * phase * std::exp(logmag);
}

NullSpaceResult null_space_coefficients(const MoMSystem& sys) {
    Eigen::MatrixXcd m = row_scaled(sys);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int n = int(m.rows());
    int nx = sys.basis.n_x, nz = sys.basis.n_z;

    NullSpaceResult r;
    r.sigma_min = s(n - 1);
    r.sigma_ratio = (n >= 2 && s(n - 2) > 0.0) ? s(n - 1) / s(n - 2) : 1.0;
    r.warning = r.sigma_ratio > 0.1;

    Eigen::VectorXcd v = svd.matrixV().col(n - 1);
    bool paired = n >= 3 && s(n - 3) > 0.0 && s(n - 2) < 0.02 * s(n - 3);
    int ktail = std::min({6, nx, nz});
    if (paired && std::min(nx, nz) >= 2 * ktail) {
        // Pick the combination of the two near-null directions whose trailing
        // expansion coefficients are smallest (the physical, convergent one).
        Eigen::MatrixXcd pair(n, 2);
        pair.col(0) = svd.matrixV().col(n - 1);
        pair.col(1) = svd.matrixV().col(n - 2);
        Eigen::MatrixXcd tails(2 * ktail, 2);
        for (int t = 0; t < ktail; ++t) {
            tails.row(t) = pair.row(nx - ktail + t);
            tails.row(ktail + t) = pair.row(nx + nz - ktail + t);
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> tsvd(tails, Eigen::ComputeFullV);
        v = pair * tsvd.matrixV().col(1);
        v /= v.norm();
    }

    r.ix.assign(size_t(nx), cplx{});
    r.iz.assign(size_t(nz), cplx{});
    for (int i = 0; i < nx; ++i) r.ix[size_t(i)] = v(i);
    for (int i = 0; i < nz; ++i) r.iz[size_t(i)] = v(nx + i);
    return r;
}

}  // namespace linewave
