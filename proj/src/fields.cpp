#include "linewave/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "linewave/kernel.hpp"

namespace linewave {

namespace {

const cplx jj(0.0, 1.0);

// (j̃x, j̃z) at real k̂x, power chain shared across orders.
std::pair<cplx, cplx> current_spectrum(const ModeSolution& sol, double kx) {
    const cplx a = sol.basis.a;
    const cplx den = kx + jj * a;
    const cplx w = (kx - jj * a) / den;
    cplx px{}, pz{};
    cplx p = 1.0;
    const size_t n = std::max(sol.ix.size(), sol.iz.size());
    for (size_t k = 0; k < n; ++k) {
        if (k < sol.ix.size()) px += sol.ix[k] * p;
        if (k < sol.iz.size()) pz += sol.iz[k] * p;
        p *= w;
    }
    const cplx f = jj / den;
    return {f * px, f * pz};
}

cplx spatial_current_x(const ModeSolution& sol, double xhat) {
    cplx s{};
    for (size_t k = 0; k < sol.ix.size(); ++k)
        s += sol.ix[k] * basis_spatial(int(k) + 1, sol.basis.a, xhat);
    return s;
}

cplx spatial_current_z(const ModeSolution& sol, double xhat) {
    cplx s{};
    for (size_t k = 0; k < sol.iz.size(); ++k)
        s += sol.iz[k] * basis_spatial(int(k) + 1, sol.basis.a, xhat);
    return s;
}

struct FieldEval {
    const ModeSolution* sol = nullptr;
    QuadratureConfig cfg;
    std::vector<double> splits;
    cplx ginf{};  // x̂x̂ asymptote of the background Green entry

    static FieldEval make(const ModeSolution& sol, const QuadratureConfig& quad) {
        FieldEval fe;
        fe.sol = &sol;
        fe.cfg = quad;
        fe.cfg.truncation =
            std::max(quad.truncation, 2.5 * (std::abs(sol.kz_hat) + std::abs(sol.basis.a)));
        SingularityCatalog cat = build_catalog(sol.structure, sol.kz_hat, sol.basis.a, sol.sheet);
        fe.splits = cat.split_points(quad.proximity_threshold);
        const cplx y1xx = sol.structure.y1.yxx;
        fe.ginf = (std::abs(y1xx) > 1e-12) ? -1.0 / y1xx : cplx{};
        return fe;
    }

    // Raw (unnormalized) tangential field at x in free-space wavelengths.
    std::pair<cplx, cplx> at(double x_over_lambda0) const {  // (e_x, e_z)
        const double xhat = 2.0 * pi * x_over_lambda0;
        const ModeSolution& s = *sol;

        auto integrand = [&](double kx, bool want_x) -> cplx {
            auto [jx, jz] = current_spectrum(s, kx);
            const GreenDyadic g = green_ee(s.structure.y1, kx, s.kz_hat, s.sheet);
            const cplx phase = std::exp(-jj * kx * xhat);
            if (want_x) return (g.gxz * jz + (g.gxx - ginf) * jx) * phase;
            return (g.gzz * jz + g.gzx * jx) * phase;
        };
        const double period = (std::abs(xhat) > 1e-12) ? 2.0 * pi / std::abs(xhat) : 0.0;
        auto run = [&](bool want_x) {
            Integrand f = [&, want_x](double kx) { return integrand(kx, want_x); };
            return integrate_real_line_oscillatory(f, cfg, splits, period).value / (2.0 * pi);
        };
        cplx ex = run(true);
        const cplx ez = run(false);
        if (xhat > 0.0) ex += ginf * spatial_current_x(s, xhat);
        return {ex, ez};
    }
};

double sample_mag(const FieldSample& s) {
    return std::sqrt(std::norm(s.e_x) + std::norm(s.e_z));
}

DecayFit fit_decay(std::vector<const FieldSample*> side, double floor_mag) {
    std::sort(side.begin(), side.end(), [](const FieldSample* a, const FieldSample* b) {
        return std::abs(a->x_over_lambda0) < std::abs(b->x_over_lambda0);
    });
    auto collect = [&](double lo) {
        std::vector<std::pair<double, double>> pts;  // (|x|/λ0, ln|e|)
        double prev = std::numeric_limits<double>::infinity();
        for (const FieldSample* s : side) {
            const double ax = std::abs(s->x_over_lambda0);
            if (ax < lo) continue;
            if (ax > 3.0) break;
            const double m = sample_mag(*s);
            if (!s->ok || !std::isfinite(m) || m <= floor_mag) break;
            if (m > prev * 1.02) break;  // left the monotone-decay region
            pts.push_back({ax, std::log(m)});
            prev = m;
        }
        return pts;
    };
    auto pts = collect(1.0);
    if (pts.size() < 4) pts = collect(0.25);
    DecayFit f;
    f.samples = int(pts.size());
    if (pts.size() < 4) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        const double xh = 2.0 * pi * x;
        sx += xh;
        sy += y;
        sxx += xh * xh;
        sxy += xh * y;
    }
    const double n = double(pts.size());
    const double denom = n * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) return f;
    f.rate = -(n * sxy - sx * sy) / denom;
    f.window_lo = pts.front().first;
    f.window_hi = pts.back().first;
    f.ok = true;
    return f;
}

}  // namespace

ModeSolution make_mode_solution(const StructureSpec& structure, const ModeSolveResult& res,
                                Sheet sheet) {
    ModeSolution sol;
    sol.structure = structure;
    sol.kz_hat = res.point.kz_hat;
    sol.sheet = sheet;
    sol.basis = res.basis;
    sol.ix = res.ix;
    sol.iz = res.iz;
    return sol;
}

std::vector<CurrentSample> current_profile(const ModeSolution& sol,
                                           const std::vector<double>& xhat) {
    std::vector<CurrentSample> out;
    out.reserve(xhat.size());
    for (double x : xhat) {
        CurrentSample s;
        s.xhat = x;
        if (x > 0.0) {
            s.j_sx = spatial_current_x(sol, x);
            s.j_sz = spatial_current_z(sol, x);
        }
        out.push_back(s);
    }
    return out;
}

FieldTable tangential_field(const ModeSolution& sol, const std::vector<double>& x_over_lambda0,
                            const FieldConfig& cfg) {
    if (cfg.y_over_lambda0 != 0.0)
        throw std::invalid_argument("field reconstruction is restricted to the surface plane y = 0");
    if (!sol.structure.y1.is_constant() || !sol.structure.y2.is_constant())
        throw std::invalid_argument("field reconstruction requires constant admittances");

    FieldTable t;
    t.samples.resize(x_over_lambda0.size());
    for (size_t i = 0; i < x_over_lambda0.size(); ++i)
        t.samples[i].x_over_lambda0 = x_over_lambda0[i];

    double cmax = 0.0;
    for (const cplx& c : sol.ix) cmax = std::max(cmax, std::abs(c));
    for (const cplx& c : sol.iz) cmax = std::max(cmax, std::abs(c));
    if (!(cmax > 0.0)) return t;  // zero solution: zero table, not normalized

    const FieldEval fe = FieldEval::make(sol, cfg.quad);

    auto fill = [&](size_t i) {
        FieldSample& s = t.samples[i];
        const double xhat = 2.0 * pi * s.x_over_lambda0;
        try {
            auto [ex, ez] = fe.at(s.x_over_lambda0);
            s.e_x = ex;
            s.e_z = ez;
            if (xhat > 0.0) {
                s.j_sx = spatial_current_x(sol, xhat);
                s.j_sz = spatial_current_z(sol, xhat);
            }
            s.ok = true;
        } catch (const std::exception&) {
            s.ok = false;
        }
    };

    int threads = cfg.threads;
    if (threads <= 0) threads = int(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min<int>(threads, std::max<size_t>(t.samples.size(), 1));
    if (threads <= 1 || t.samples.size() < 2) {
        for (size_t i = 0; i < t.samples.size(); ++i) fill(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (size_t i = size_t(w); i < t.samples.size(); i += size_t(threads)) fill(i);
            });
        for (auto& th : pool) th.join();
    }

    cplx ez0{};
    try {
        ez0 = fe.at(1e-4).second;
    } catch (const std::exception&) {
        return t;  // leave the raw table unnormalized
    }
    if (!(std::isfinite(std::abs(ez0)) && std::abs(ez0) > 0.0)) return t;
    for (FieldSample& s : t.samples) {
        s.e_x /= ez0;
        s.e_z /= ez0;
        s.j_sx /= ez0;
        s.j_sz /= ez0;
    }
    t.norm_factor = ez0;
    t.normalized = true;
    return t;
}

DiagnosticsReport diagnostics(const ModeSolution& sol, const FieldTable& table,
                              const FieldConfig& cfg) {
    DiagnosticsReport r;
    if (!table.normalized) {
        r.all_nan = true;
        return r;
    }
    const FieldEval fe = FieldEval::make(sol, cfg.quad);
    auto probe = [&](double x) {
        auto p = fe.at(x);
        return std::pair<cplx, cplx>{p.first / table.norm_factor, p.second / table.norm_factor};
    };

    const auto [exp_, unused_ezp] = probe(1e-3);
    const auto [exm, unused_ezm] = probe(-1e-3);
    r.jump_ratio = exp_ / exm;
    r.ez_gap = std::abs(probe(1e-4).second - probe(-1e-4).second);

    r.finite_near_edge = true;
    r.max_near_edge = 0.0;
    for (double x : {-0.009, -0.005, -0.002, 0.002, 0.005, 0.009}) {
        const auto [ex, ez] = probe(x);
        const double m = std::sqrt(std::norm(ex) + std::norm(ez));
        if (!std::isfinite(m)) r.finite_near_edge = false;
        r.max_near_edge = std::max(r.max_near_edge, m);
    }

    double emax = 0.0;
    for (const FieldSample& s : table.samples)
        if (s.ok) emax = std::max(emax, sample_mag(s));
    const double floor_mag = 1e-9 * emax;

    std::vector<const FieldSample*> pos, neg;
    for (const FieldSample& s : table.samples) {
        if (s.x_over_lambda0 > 0.0) pos.push_back(&s);
        if (s.x_over_lambda0 < 0.0) neg.push_back(&s);
    }
    r.decay_pos = fit_decay(pos, floor_mag);
    r.decay_neg = fit_decay(neg, floor_mag);

    // Phase linearity of e_z across the junction.
    std::vector<const FieldSample*> ph;
    for (const FieldSample& s : table.samples) {
        const double ax = std::abs(s.x_over_lambda0);
        if (s.ok && ax >= 0.05 && ax <= 2.0 && std::abs(s.e_z) > 1e-6 * emax) ph.push_back(&s);
    }
    std::sort(ph.begin(), ph.end(), [](const FieldSample* a, const FieldSample* b) {
        return a->x_over_lambda0 < b->x_over_lambda0;
    });
    if (ph.size() >= 4) {
        std::vector<double> phase(ph.size());
        double prev_raw = std::arg(ph[0]->e_z), acc = prev_raw;
        phase[0] = acc;
        for (size_t i = 1; i < ph.size(); ++i) {
            const double raw = std::arg(ph[i]->e_z);
            double d = raw - prev_raw;
            while (d > pi) d -= 2.0 * pi;
            while (d < -pi) d += 2.0 * pi;
            acc += d;
            prev_raw = raw;
            phase[i] = acc;
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        for (size_t i = 0; i < ph.size(); ++i) {
            const double xh = 2.0 * pi * ph[i]->x_over_lambda0;
            sx += xh;
            sy += phase[i];
            sxx += xh * xh;
            sxy += xh * phase[i];
            syy += phase[i] * phase[i];
        }
        const double n = double(ph.size());
        const double den = n * sxx - sx * sx;
        if (std::abs(den) > 0.0) {
            r.phase_slope = (n * sxy - sx * sy) / den;
            const double sstot = syy - sy * sy / n;
            if (sstot < 1e-12) {
                r.phase_r2 = 1.0;
            } else {
                const double b0 = (sy - r.phase_slope * sx) / n;
                double ssres = 0.0;
                for (size_t i = 0; i < ph.size(); ++i) {
                    const double e = phase[i] - (b0 + r.phase_slope * 2.0 * pi * ph[i]->x_over_lambda0);
                    ssres += e * e;
                }
                r.phase_r2 = 1.0 - ssres / sstot;
            }
        }
    }

    // e_x / e_z quadrature, medians per side.
    auto side_dev = [&](bool positive) -> double {
        std::vector<double> devs;
        for (const FieldSample& s : table.samples) {
            if (!s.ok || (s.x_over_lambda0 > 0.0) != positive) continue;
            const double ax = std::abs(s.x_over_lambda0);
            if (ax < 0.1 || ax > 1.5) continue;
            if (std::abs(s.e_z) < 1e-6 * emax || std::abs(s.e_x) < 1e-6 * emax) continue;
            const double phi = std::arg(s.e_x / s.e_z);
            devs.push_back(std::min(std::abs(phi - pi / 2.0), std::abs(phi + pi / 2.0)));
        }
        if (devs.empty()) return std::numeric_limits<double>::quiet_NaN();
        std::sort(devs.begin(), devs.end());
        return devs[devs.size() / 2];
    };
    const double dp = side_dev(true), dn = side_dev(false);
    if (std::isfinite(dp) || std::isfinite(dn)) {
        double m = 0.0;
        if (std::isfinite(dp)) m = std::max(m, dp);
        if (std::isfinite(dn)) m = std::max(m, dn);
        r.quadrature_dev_deg = m * 180.0 / pi;
    }
    return r;
}

double current_field_consistency(const ModeSolution& sol, const FieldTable& table) {
    if (!table.normalized) return std::numeric_limits<double>::quiet_NaN();
    const auto e1 = sol.structure.y1.at(cplx{}, sol.kz_hat);
    const auto e2 = sol.structure.y2.at(cplx{}, sol.kz_hat);
    const cplx dzz = e2[0] - e1[0], dzx = e2[1] - e1[1];
    const cplx dxz = e2[2] - e1[2], dxx = e2[3] - e1[3];
    double num = 0.0, den = 0.0;
    for (const FieldSample& s : table.samples) {
        if (!s.ok) continue;
        const double x = s.x_over_lambda0;
        if (x <= 0.05 || x >= 2.0) continue;
        const cplx jz_pred = dzz * s.e_z + dzx * s.e_x;
        const cplx jx_pred = dxz * s.e_z + dxx * s.e_x;
        num += std::norm(jz_pred - s.j_sz) + std::norm(jx_pred - s.j_sx);
        den += std::norm(s.j_sz) + std::norm(s.j_sx);
    }
    if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(num / den);
}

}  // namespace linewave
