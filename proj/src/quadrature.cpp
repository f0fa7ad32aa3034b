#include "linewave/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace linewave {

namespace {

constexpr double ts_tmax = 3.45;
constexpr double es_tmax = 4.0;
constexpr double h0 = 0.5;

struct Node {
    double ab;  // abscissa in the transformed variable, in (-1,1) for tanh-sinh
    double w;   // weight (jacobian included)
};

// Nested node ladders, level L holding only the nodes new at step h0/2^L.
std::vector<std::vector<Node>> build_ladder(double tmax, bool tanh_map) {
    std::vector<std::vector<Node>> ladder;
    for (int level = 0; level <= 14; ++level) {
        double h = h0 / double(1 << level);
        std::vector<Node> nodes;
        long kmax = long(tmax / h);
        for (long k = -kmax; k <= kmax; ++k) {
            if (level > 0 && (k % 2) == 0) continue;  // already in coarser levels
            double t = double(k) * h;
            double sh = (pi / 2.0) * std::sinh(t);
            double ch = (pi / 2.0) * std::cosh(t);
            Node n;
            if (tanh_map) {
                n.ab = std::tanh(sh);
                double c = std::cosh(sh);
                n.w = ch / (c * c);
            } else {
                n.ab = std::exp(sh);
                n.w = ch * n.ab;
            }
            if (n.w < 1e-280 || !std::isfinite(n.w)) continue;
            nodes.push_back(n);
        }
        ladder.push_back(std::move(nodes));
    }
    return ladder;
}

const std::vector<std::vector<Node>>& ts_ladder() {
    static const auto l = build_ladder(ts_tmax, true);
    return l;
}

const std::vector<std::vector<Node>>& es_ladder() {
    static const auto l = build_ladder(es_tmax, false);
    return l;
}

QuadResult run_ladder(const std::vector<std::vector<Node>>& ladder,
                      const std::function<cplx(const Node&)>& eval,
                      const QuadratureConfig& cfg) {
    int max_levels = std::min(cfg.max_levels, int(ladder.size()) - 1);
    cplx value{};
    cplx prev{};
    QuadResult r;
    for (int level = 0; level <= max_levels; ++level) {
        double h = h0 / double(1 << level);
        cplx add{};
        for (const Node& n : ladder[level]) add += eval(n);
        value = (level == 0) ? h * add : value / 2.0 + h * add;
        r.levels = level;
        if (level >= 2) {
            double corr = std::abs(value - prev);
            r.error_estimate = corr;
            double scale = std::max(std::abs(value), 1e-300);
            if (corr <= cfg.rel_tol * scale) {
                r.value = value;
                r.converged = true;
                return r;
            }
        }
        prev = value;
    }
    r.value = prev;
    r.converged = false;
    return r;
}

std::vector<double> clean_splits(std::vector<double> s, double lo, double hi) {
    std::vector<double> out;
    std::sort(s.begin(), s.end());
    for (double v : s) {
        if (v <= lo + 1e-12 || v >= hi - 1e-12) continue;
        if (!out.empty() && v - out.back() < 1e-9) continue;
        out.push_back(v);
    }
    return out;
}

}  // namespace

QuadResult tanh_sinh(const Integrand& f, double a, double b, const QuadratureConfig& cfg) {
    double c = 0.5 * (a + b), s = 0.5 * (b - a);
    auto eval = [&](const Node& n) { return s * n.w * f(c + s * n.ab); };
    return run_ladder(ts_ladder(), eval, cfg);
}

QuadResult exp_sinh_tail(const Integrand& f, double a, int direction,
                         const QuadratureConfig& cfg) {
    double sgn = direction >= 0 ? 1.0 : -1.0;
    auto eval = [&](const Node& n) { return n.w * f(a + sgn * n.ab); };
    return run_ladder(es_ladder(), eval, cfg);
}

namespace {

QuadResult accumulate_segments(const std::vector<std::pair<double, double>>& segments,
                               bool with_tails, double lo, double hi, const Integrand& f,
                               const QuadratureConfig& cfg) {
    QuadResult total;
    total.converged = true;
    auto take = [&](QuadResult piece) {
        total.value += piece.value;
        total.error_estimate += piece.error_estimate;
        total.levels = std::max(total.levels, piece.levels);
        total.converged = total.converged && piece.converged;
    };
    for (auto [a, b] : segments) take(tanh_sinh(f, a, b, cfg));
    if (with_tails) {
        take(exp_sinh_tail(f, hi, +1, cfg));
        take(exp_sinh_tail(f, lo, -1, cfg));
    }
    if (!total.converged)
        throw QuadratureError("quadrature failed to converge within max_levels",
                              total.value, total.error_estimate);
    return total;
}

}  // namespace

QuadResult integrate_real_line(const Integrand& f, const QuadratureConfig& cfg,
                               const std::vector<double>& split_points) {
    double t = cfg.truncation;
    std::vector<double> cuts = clean_splits(split_points, -t, t);
    cuts.insert(cuts.begin(), -t);
    cuts.push_back(t);
    std::vector<std::pair<double, double>> segments;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) segments.push_back({cuts[i], cuts[i + 1]});
    return accumulate_segments(segments, true, -t, t, f, cfg);
}

QuadResult integrate_real_line_oscillatory(const Integrand& f, const QuadratureConfig& cfg,
                                           const std::vector<double>& split_points,
                                           double period) {
    if (!(period > 0.0)) return integrate_real_line(f, cfg, split_points);
    double outermost = 0.0;
    for (double s : split_points) outermost = std::max(outermost, std::abs(s));
    double k = std::clamp(outermost + 50.0 * period, 400.0, 5e5);
    std::vector<double> cuts = clean_splits(split_points, -k, k);
    cuts.insert(cuts.begin(), -k);
    cuts.push_back(k);
    double panel = 10.0 * period;
    std::vector<std::pair<double, double>> segments;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], b = cuts[i + 1];
        int parts = std::max(1, int(std::ceil((b - a) / panel)));
        double w = (b - a) / parts;
        for (int p = 0; p < parts; ++p) segments.push_back({a + p * w, a + (p + 1) * w});
    }
    return accumulate_segments(segments, false, -k, k, f, cfg);
}

}  // namespace linewave
