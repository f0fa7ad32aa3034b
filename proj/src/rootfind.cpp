#include "linewave/rootfind.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>

namespace linewave {

namespace {

struct Sample {
    cplx z, f;
};

// Roots of c[0] + c[1] z + ... + c[n] z^n via the companion matrix.
std::vector<cplx> poly_roots(const std::vector<cplx>& c) {
    double cmax = 0.0;
    for (const cplx& v : c) cmax = std::max(cmax, std::abs(v));
    if (!(cmax > 0.0)) return {};
    int deg = static_cast<int>(c.size()) - 1;
    while (deg > 0 && std::abs(c[deg]) <= 1e-13 * cmax) --deg;
    if (deg < 1) return {};
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int k = 0; k + 1 < deg; ++k) comp(k + 1, k) = 1.0;
    for (int k = 0; k < deg; ++k) comp(k, deg - 1) = -c[k] / c[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + deg);
    return roots;
}

// Least-squares rational fit P/Q (orders np/nd, Q(0)=1) to the samples in
// coordinates (z - center)/scale; returns the zeros of P mapped back.
std::vector<cplx> interpolant_zeros(const std::vector<Sample>& s, cplx center, double scale,
                                    int np, int nd) {
    const int m = static_cast<int>(s.size());
    const int cols = np + 1 + nd;
    double fmax = 0.0;
    for (const Sample& e : s) fmax = std::max(fmax, std::abs(e.f));
    if (!(fmax > 0.0)) return {center};  // residual vanishes on the whole stencil

    Eigen::MatrixXcd A(m, cols);
    Eigen::VectorXcd b(m);
    for (int i = 0; i < m; ++i) {
        const cplx zt = (s[i].z - center) / scale;
        const cplx fn = s[i].f / fmax;
        cplx p = 1.0;
        for (int k = 0; k <= np; ++k) {
            A(i, k) = p;
            p *= zt;
        }
        p = zt;
        for (int k = 1; k <= nd; ++k) {
            A(i, np + k) = -fn * p;
            p *= zt;
        }
        b(i) = fn;
    }
    Eigen::VectorXcd x = A.colPivHouseholderQr().solve(b);
    std::vector<cplx> num(x.data(), x.data() + np + 1);
    std::vector<cplx> out;
    for (const cplx& zt : poly_roots(num)) out.push_back(center + scale * zt);
    return out;
}

struct Best {
    cplx z{};
    double mag = std::numeric_limits<double>::infinity();
    void track(cplx zz, cplx f) {
        const double m = std::abs(f);
        if (m < mag) {
            mag = m;
            z = zz;
        }
    }
};

// Muller iteration with a step clip; returns iterations used and leaves z at
// the smallest-residual iterate seen. Iterates are confined to the same
// three-window ellipse around the seed that bounds the rational-fit
// candidates, so a rugged residual cannot walk the polish onto an unrelated
// zero far from the requested search region.
int muller_polish(const ResidualFn& residual, cplx& z, double clip, double tol, int max_it,
                  cplx seed, double wb, double wa, Best& best, bool& converged) {
    auto inside = [&](cplx p) {
        const double eb = (p.real() - seed.real()) / wb;
        const double ea = (p.imag() - seed.imag()) / wa;
        return eb * eb + ea * ea <= 9.0;
    };
    const double h = std::max(100.0 * tol, 1e-4 * clip);
    cplx x0 = z - h, x1 = z + h, x2 = z;
    cplx f0 = residual(x0), f1 = residual(x1), f2 = residual(x2);
    best.track(x0, f0);
    best.track(x1, f1);
    best.track(x2, f2);
    converged = false;
    int it = 0;
    for (; it < max_it; ++it) {
        const cplx d1 = (f2 - f1) / (x2 - x1);
        const cplx d2 = (f1 - f0) / (x1 - x0);
        const cplx a = (d1 - d2) / (x2 - x0);
        const cplx bb = d1 + (x2 - x1) * a;
        const cplx disc = std::sqrt(bb * bb - 4.0 * a * f2);
        cplx den = (std::abs(bb + disc) >= std::abs(bb - disc)) ? bb + disc : bb - disc;
        cplx dz;
        if (std::abs(den) > 0.0) {
            dz = -2.0 * f2 / den;
        } else if (std::abs(d1) > 0.0) {
            dz = -f2 / d1;  // secant fallback
        } else {
            break;
        }
        if (std::abs(dz) > clip) dz *= clip / std::abs(dz);
        const cplx xn = x2 + dz;
        if (!inside(xn)) break;
        const cplx fn = residual(xn);
        best.track(xn, fn);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        x2 = xn;
        f2 = fn;
        if (std::abs(dz) < tol) {
            converged = true;
            break;
        }
    }
    z = best.z;
    return it;
}

}  // namespace

RootReport find_root(const ResidualFn& residual, const RootSearchConfig& cfg) {
    const double wb = cfg.window_beta, wa = cfg.window_alpha;
    if (!(wb > 0.0) || !(wa > 0.0)) throw std::invalid_argument("search window must be positive");
    if (cfg.pade_samples < cfg.pade_num + cfg.pade_den + 2)
        throw std::invalid_argument("pade_samples too small for the requested orders");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

    cplx center = cfg.seed;
    Best best;
    double shrink = 1.0;
    double center_mag_best = std::numeric_limits<double>::infinity();
    double stencil_scale = -1.0;  // median |residual| on the first stencil
    int no_improve = 0;
    bool outer_converged = false;
    RootReport rep;

    for (int outer = 0; outer < cfg.max_outer; ++outer) {
        rep.outer_iterations = outer + 1;
        if (cfg.on_outer_update) cfg.on_outer_update(center);

        const double rb = 0.5 * wb * shrink, ra = 0.5 * wa * shrink;
        std::vector<Sample> s;
        s.reserve(cfg.pade_samples + 1);
        for (int i = 0; i < cfg.pade_samples; ++i) {
            const double phi = 2.0 * pi * (i + 0.5) / cfg.pade_samples;
            const cplx z = center + cplx(rb * std::cos(phi), ra * std::sin(phi));
            try {
                const cplx f = residual(z);
                best.track(z, f);
                s.push_back({z, f});
            } catch (const QuadratureError&) {
                // skip unevaluable stencil points (e.g. window edge grazing a
                // surface-wave pole) as long as enough remain for the fit
            }
        }
        const cplx fc = residual(center);
        best.track(center, fc);
        s.push_back({center, fc});
        if (static_cast<int>(s.size()) < cfg.pade_num + cfg.pade_den + 2)
            throw RootSearchError("stagnation", best.z, best.mag);
        if (stencil_scale < 0.0) {
            std::vector<double> mags;
            mags.reserve(s.size());
            for (const Sample& e : s) mags.push_back(std::abs(e.f));
            std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
            stencil_scale = mags[mags.size() / 2];
        }

        if (std::abs(fc) < 0.9 * center_mag_best)
            no_improve = 0;
        else
            ++no_improve;
        center_mag_best = std::min(center_mag_best, std::abs(fc));
        // A plateaued center residual means the rational fit has hit its bias
        // floor; stop refining the stencil and let the local polish finish.
        if (no_improve >= 3) break;

        const double scale = std::sqrt(rb * ra);
        auto cands = interpolant_zeros(s, center, scale, cfg.pade_num, cfg.pade_den);
        bool found = false;
        cplx pick{};
        double dbest = std::numeric_limits<double>::infinity();
        for (const cplx& z : cands) {
            const double eb = (z.real() - cfg.seed.real()) / wb;
            const double ea = (z.imag() - cfg.seed.imag()) / wa;
            if (eb * eb + ea * ea > 9.0) continue;
            const double d = std::abs(z - center);
            if (d < dbest) {
                dbest = d;
                pick = z;
                found = true;
            }
        }
        if (!found) throw RootSearchError("no root in window", best.z, best.mag);

        const double step = std::abs(pick - center);
        center = pick;
        if (step < cfg.tol) {
            outer_converged = true;
            break;
        }
        shrink = std::max(shrink * 0.6, 0.08);
    }

    if (cfg.on_outer_update) cfg.on_outer_update(center);
    cplx z = center;
    bool polished = false;
    rep.polish_iterations = muller_polish(residual, z, 0.25 * (wb + wa), cfg.tol, 40, cfg.seed,
                                          wb, wa, best, polished);
    if (!outer_converged && !polished) throw RootSearchError("stagnation", best.z, best.mag);
    // A root must beat the stencil's residual scale by a wide margin;
    // otherwise the iteration merely plateaued on a shallow local minimum.
    if (stencil_scale > 0.0 && !(best.mag <= 1e-4 * stencil_scale))
        throw RootSearchError("stagnation", best.z, best.mag);
    rep.root = best.z;
    rep.residual_mag = best.mag;
    return rep;
}

RootReport find_root_bound(const ResidualFn& residual, const RootSearchConfig& cfg) {
    if (std::abs(cfg.seed.imag()) > 1e-12) return find_root(residual, cfg);
    const double x0 = cfg.seed.real(), w = cfg.window_beta;
    const int n = std::max(17, 2 * cfg.pade_samples + 1);

    auto eval = [&](double x) -> std::optional<cplx> {
        if (cfg.on_outer_update) cfg.on_outer_update(cplx(x, 0.0));
        try {
            return residual(cplx(x, 0.0));
        } catch (const QuadratureError&) {
            return std::nullopt;
        }
    };

    std::vector<double> xs(n);
    std::vector<std::optional<cplx>> fs(n);
    double fmax = 0.0, imax = 0.0;
    for (int i = 0; i < n; ++i) {
        xs[i] = x0 - w + 2.0 * w * i / (n - 1);
        fs[i] = eval(xs[i]);
        if (fs[i]) {
            fmax = std::max(fmax, std::abs(*fs[i]));
            imax = std::max(imax, std::abs(fs[i]->imag()));
        }
    }
    if (!(fmax > 0.0) || imax > 1e-3 * fmax) return find_root(residual, cfg);

    int bracket = -1;
    double dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < n; ++i) {
        if (!fs[i] || !fs[i + 1]) continue;
        if (fs[i]->real() == 0.0) {
            bracket = i;
            dist = 0.0;
            break;
        }
        if (fs[i]->real() * fs[i + 1]->real() < 0.0) {
            const double mid = 0.5 * (xs[i] + xs[i + 1]);
            if (std::abs(mid - x0) < dist) {
                dist = std::abs(mid - x0);
                bracket = i;
            }
        }
    }
    if (bracket < 0) return find_root(residual, cfg);

    double a = xs[bracket], b = xs[bracket + 1];
    double fa = fs[bracket]->real();
    int it = 0;
    while (b - a > cfg.tol && it < 200) {
        const double m = 0.5 * (a + b);
        const auto fm = eval(m);
        ++it;
        if (!fm) break;
        const double fmr = fm->real();
        if (fmr == 0.0) {
            a = b = m;
            break;
        }
        if ((fmr > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fmr;
        } else {
            b = m;
        }
    }
    const double r = 0.5 * (a + b);
    const auto fr = eval(r);
    RootReport rep;
    rep.root = r;
    rep.outer_iterations = it;
    rep.polish_iterations = 0;
    rep.residual_mag = fr ? std::abs(*fr) : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

ModeSolveResult solve_mode_full(const StructureSpec& structure, const ModeSolveOptions& opts) {
    ModeSolveResult res;
    switch (opts.strategy) {
        case BasisStrategy::FixedHalf:
            res.basis = BasisSpec::fixed_half(opts.n_x, opts.n_z);
            break;
        case BasisStrategy::ModeMatched:
            res.basis = BasisSpec::mode_matched(opts.n_x, opts.n_z, opts.root.seed);
            break;
        case BasisStrategy::UserValue:
            res.basis = BasisSpec::user_value(opts.n_x, opts.n_z, opts.a_user);
            break;
    }
    BasisSpec& bs = res.basis;
    const ResidualFn residual = [&](cplx kz) {
        return dispersion_residual(assemble(structure, kz, bs, opts.sheet, opts.quad));
    };
    RootSearchConfig rc = opts.root;
    rc.on_outer_update = [&bs](cplx c) { bs.refresh(c); };

    ModePoint& pt = res.point;
    try {
        const RootReport rep =
            opts.bound_real_axis_first ? find_root_bound(residual, rc) : find_root(residual, rc);
        pt.kz_hat = rep.root;
        pt.residual_mag = rep.residual_mag;
        const MoMSystem sys = assemble(structure, rep.root, bs, opts.sheet, opts.quad);
        NullSpaceResult ns = null_space_coefficients(sys);
        pt.sigma_min = ns.sigma_min;
        res.ix = std::move(ns.ix);
        res.iz = std::move(ns.iz);
        pt.status = "ok";
    } catch (const RootSearchError& e) {
        pt.kz_hat = e.best_iterate;
        pt.residual_mag = e.residual_mag;
        pt.status = e.what();
    } catch (const QuadratureError& e) {
        pt.kz_hat = rc.seed;
        pt.status = e.what();
    }
    return res;
}

ModePoint solve_mode(const StructureSpec& structure, const ModeSolveOptions& opts) {
    return solve_mode_full(structure, opts).point;
}

std::vector<ModePoint> sweep(const std::function<StructureSpec(double)>& family,
                             const std::vector<double>& grid, const ModeSolveOptions& opts) {
    std::vector<ModePoint> out;
    out.reserve(grid.size());
    std::vector<size_t> ok_idx;

    for (size_t i = 0; i < grid.size(); ++i) {
        ModeSolveOptions o = opts;
        if (ok_idx.size() >= 2) {
            const ModePoint& p1 = out[ok_idx[ok_idx.size() - 1]];
            const ModePoint& p0 = out[ok_idx[ok_idx.size() - 2]];
            const double dp = p1.param - p0.param;
            o.root.seed = (std::abs(dp) > 0.0)
                              ? p1.kz_hat + (p1.kz_hat - p0.kz_hat) * ((grid[i] - p1.param) / dp)
                              : p1.kz_hat;
        } else if (ok_idx.size() == 1) {
            o.root.seed = out[ok_idx[0]].kz_hat;
        }
        ModePoint pt = solve_mode(family(grid[i]), o);
        pt.param = grid[i];
        if (i == 0 && !pt.ok())
            throw RootSearchError("first sweep point failed: " + pt.status, pt.kz_hat,
                                  pt.residual_mag);
        if (pt.ok()) ok_idx.push_back(out.size());
        out.push_back(pt);
    }
    return out;
}

}  // namespace linewave
