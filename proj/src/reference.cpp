#include "linewave/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "linewave/kernel.hpp"

namespace linewave {
namespace reference {

namespace {

// G7/K15 nodes and weights (positive half; nodes symmetric about 0).
constexpr double xgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                           0.741531185599394, 0.586087235467691, 0.405845151377397,
                           0.207784955007898, 0.0};
constexpr double wgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                           0.140653259715525, 0.169004726639267, 0.190350578064785,
                           0.204432940075298, 0.209482141084728};
constexpr double wg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                          0.417959183673469};

struct GkPiece {
    cplx k15;
    double err;
};

GkPiece gk15(const Integrand& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx fk[8][2];
    for (int i = 0; i < 8; ++i) {
        fk[i][0] = f(c - h * xgk[i]);
        fk[i][1] = (i == 7) ? fk[i][0] : f(c + h * xgk[i]);
    }
    cplx k15{}, g7{};
    for (int i = 0; i < 8; ++i) {
        const cplx pair_sum = (i == 7) ? fk[i][0] : fk[i][0] + fk[i][1];
        k15 += wgk[i] * pair_sum;
        if (i % 2 == 1) g7 += wg[i / 2] * pair_sum;
    }
    g7 += wg[3] * fk[7][0];
    k15 *= h;
    g7 *= h;
    return {k15, std::abs(k15 - g7)};
}

cplx gk_adaptive(const Integrand& f, double a, double b, double tol, int depth) {
    const GkPiece p = gk15(f, a, b);
    if (p.err <= tol * std::max(1.0, std::abs(p.k15)) || depth <= 0) return p.k15;
    const double m = 0.5 * (a + b);
    return gk_adaptive(f, a, m, tol * 0.7071, depth - 1) +
           gk_adaptive(f, m, b, tol * 0.7071, depth - 1);
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

}  // namespace

cplx gk_integrate(const Integrand& f, double a, double b, double tol, int max_depth) {
    return gk_adaptive(f, a, b, tol, max_depth);
}

cplx gk_real_line(const Integrand& f, double tol, const std::vector<double>& extra_splits) {
    // θ ∈ (0, π), k̂x = cot θ = cosθ/sinθ, dk̂x = -dθ/sin²θ.
    Integrand g = [&](double th) {
        const double s = std::sin(th);
        return f(std::cos(th) / s) / (s * s);
    };
    std::vector<double> cuts{0.0, pi / 2.0, pi};
    for (double kx : extra_splits) cuts.push_back(pi / 2.0 - std::atan(kx));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               cuts.end());
    cplx total{};
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
        total += gk_integrate(g, cuts[i], cuts[i + 1], tol);
    return total;
}

cplx laguerre_explicit(int n, cplx u) {
    if (n < 0 || n > 8) throw std::out_of_range("explicit Laguerre table covers n <= 8 only");
    double fact = 1.0;
    cplx sum{}, upow = 1.0;
    for (int k = 0; k <= n; ++k) {
        if (k > 0) {
            fact *= k;
            upow *= u;
        }
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        sum += sign * binom(n, k) / fact * upow;
    }
    return sum;
}

cplx basis_spatial_oracle(int n, cplx a, double xhat) {
    if (xhat < 0.0) throw std::domain_error("basis supported on x >= 0 only");
    return laguerre_explicit(n - 1, 2.0 * a * xhat) * std::exp(-a * xhat);
}

cplx basis_spectral_oracle(int n, cplx a, cplx kx_hat) {
    const cplx j(0.0, 1.0);
    return j * std::pow(kx_hat - j * a, n - 1) / std::pow(kx_hat + j * a, n);
}

GreenDyadic green_oracle(const AdmittanceDyadic& y1, cplx kx_hat, cplx kz_hat, Sheet sheet) {
    const cplx kt2 = kx_hat * kx_hat + kz_hat * kz_hat;
    const cplx ky = vertical_wavenumber(kt2, sheet);
    const auto e = y1.at(kx_hat, kz_hat);
    Eigen::Matrix2cd m;  // (z, x) ordering
    m(0, 0) = (1.0 - kx_hat * kx_hat) / ky + e[0];
    m(0, 1) = kz_hat * kx_hat / ky + e[1];
    m(1, 0) = kz_hat * kx_hat / ky + e[2];
    m(1, 1) = (1.0 - kz_hat * kz_hat) / ky + e[3];
    const Eigen::Matrix2cd g = -m.inverse();
    GreenDyadic out;
    out.gzz = g(0, 0);
    out.gzx = g(0, 1);
    out.gxz = g(1, 0);
    out.gxx = g(1, 1);
    out.resonance = std::abs(m.determinant() * ky) < resonance_floor;
    return out;
}

std::optional<ClosedFormSw> closed_form_sw(cplx zbar) {
    if (std::abs(zbar.real()) > 1e-12 * std::max(1.0, std::abs(zbar))) return std::nullopt;
    const double x = zbar.imag();
    if (x == 0.0) return std::nullopt;
    if (x > 0.0) return ClosedFormSw{Polarization::TM, std::sqrt(cplx(1.0 + x * x, 0.0))};
    return ClosedFormSw{Polarization::TE, std::sqrt(cplx(1.0 + 1.0 / (x * x), 0.0))};
}

Eigen::MatrixXcd dense_assemble(const StructureSpec& structure, cplx kz_hat,
                                const BasisSpec& basis, Sheet sheet, double tol) {
    if (structure.zero_contrast())
        throw std::invalid_argument("degenerate structure: no line discontinuity");
    const KernelEvaluator ev = KernelEvaluator::make(structure, kz_hat, basis.a, sheet);
    const std::vector<double> splits = ev.catalog.split_points(0.5);

    const int nx = basis.n_x, nz = basis.n_z;
    const int n = nx + nz;
    Eigen::MatrixXcd m(n, n);
    const cplx a = basis.a;

    auto entry = [&](int kidx, int morder, int norder) {
        Integrand f = [&](double kx) {
            const cplx kv = ev.at(cplx(kx, 0.0))[size_t(kidx)];
            return basis_spectral_oracle(morder, a, cplx(-kx, 0.0)) * kv *
                   basis_spectral_oracle(norder, a, cplx(kx, 0.0));
        };
        return gk_real_line(f, tol, splits) / (2.0 * pi);
    };

    for (int r = 0; r < n; ++r) {
        const bool rx = r < nx;
        const int morder = rx ? r + 1 : r - nx + 1;
        for (int c = 0; c < n; ++c) {
            const bool cx = c < nx;
            const int norder = cx ? c + 1 : c - nx + 1;
            // kernel entry order {zz, zx, xz, xx}
            const int kidx = rx ? (cx ? 3 : 2) : (cx ? 1 : 0);
            m(r, c) = entry(kidx, morder, norder);
        }
    }
    return m;
}

void OracleReport::add(const std::string& name, const std::string& inputs, cplx value) {
    entries.push_back({name, fnv1a_digest(inputs), value});
}

const OracleEntry* OracleReport::find(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return &e;
    return nullptr;
}

std::string fnv1a_digest(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_golden(const OracleReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open golden file for writing: " + path);
    out << "name, inputs-digest, re, im\n";
    char buf[128];
    for (const auto& e : rep.entries) {
        std::snprintf(buf, sizeof buf, "%.17g, %.17g", e.value.real(), e.value.imag());
        out << e.name << ", " << e.digest << ", " << buf << "\n";
    }
}

OracleReport read_golden(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open golden file: " + path);
    OracleReport rep;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.rfind("name,", 0) == 0 || line.rfind("name ,", 0) == 0)
            continue;
        std::stringstream ss(line);
        std::string name, digest, re, im;
        if (!std::getline(ss, name, ',') || !std::getline(ss, digest, ',') ||
            !std::getline(ss, re, ',') || !std::getline(ss, im, ','))
            throw std::runtime_error("malformed golden line: " + line);
        auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            s = (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
        };
        trim(name);
        trim(digest);
        trim(re);
        trim(im);
        rep.entries.push_back({name, digest, cplx(std::stod(re), std::stod(im))});
    }
    return rep;
}

}  // namespace reference
}  // namespace linewave
