#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "linewave/fields.hpp"
#include "linewave/reference.hpp"
#include "linewave/rootfind.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace linewave;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// config access with key-path error reporting

const json* find_path(const json& root, const std::string& path) {
    const json* cur = &root;
    size_t pos = 0;
    while (pos < path.size()) {
        size_t dot = path.find('.', pos);
        std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
        if (!cur->is_object() || !cur->contains(key)) return nullptr;
        cur = &(*cur)[key];
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    return cur;
}

double num_at(const json& root, const std::string& path) {
    const json* v = find_path(root, path);
    if (!v) throw ConfigError(path + ": missing required key");
    if (!v->is_number()) throw ConfigError(path + ": expected a number");
    return v->get<double>();
}

double num_or(const json& root, const std::string& path, double def) {
    const json* v = find_path(root, path);
    if (!v) return def;
    if (!v->is_number()) throw ConfigError(path + ": expected a number");
    return v->get<double>();
}

int int_or(const json& root, const std::string& path, int def) {
    const json* v = find_path(root, path);
    if (!v) return def;
    if (!v->is_number_integer()) throw ConfigError(path + ": expected an integer");
    return v->get<int>();
}

bool bool_or(const json& root, const std::string& path, bool def) {
    const json* v = find_path(root, path);
    if (!v) return def;
    if (!v->is_boolean()) throw ConfigError(path + ": expected a boolean");
    return v->get<bool>();
}

std::string str_or(const json& root, const std::string& path, const std::string& def) {
    const json* v = find_path(root, path);
    if (!v) return def;
    if (!v->is_string()) throw ConfigError(path + ": expected a string");
    return v->get<std::string>();
}

cplx cplx_at(const json& root, const std::string& path) {
    const json* v = find_path(root, path);
    if (!v) throw ConfigError(path + ": missing required key");
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
        throw ConfigError(path + ": expected [re, im]");
    return cplx((*v)[0].get<double>(), (*v)[1].get<double>());
}

cplx cplx_or(const json& root, const std::string& path, cplx def) {
    if (!find_path(root, path)) return def;
    return cplx_at(root, path);
}

json cplx_json(cplx v) { return json::array({v.real(), v.imag()}); }

// ---------------------------------------------------------------------------
// structure sides

struct SideSpec {
    std::string type;  // isotropic | axial | rotated
    cplx z{}, z_zz{}, z_xx{}, z_u{}, z_v{};
    double xi = 0.0;

    AdmittanceDyadic build() const {
        if (type == "isotropic") return isotropic_admittance(z);
        if (type == "axial") return axial_admittance(z_zz, z_xx);
        return rotated_axial_admittance(z_u, z_v, xi);
    }
    json echo() const {
        json j;
        j["type"] = type;
        if (type == "isotropic") j["z"] = cplx_json(z);
        if (type == "axial") {
            j["z_zz"] = cplx_json(z_zz);
            j["z_xx"] = cplx_json(z_xx);
        }
        if (type == "rotated") {
            j["z_u"] = cplx_json(z_u);
            j["z_v"] = cplx_json(z_v);
            j["xi"] = xi;
        }
        return j;
    }
};

SideSpec parse_side(const json& root, const std::string& path) {
    SideSpec s;
    s.type = str_or(root, path + ".type", "");
    if (s.type == "isotropic") {
        s.z = cplx_at(root, path + ".z");
    } else if (s.type == "axial") {
        s.z_zz = cplx_at(root, path + ".z_zz");
        s.z_xx = cplx_at(root, path + ".z_xx");
    } else if (s.type == "rotated") {
        s.z_u = cplx_at(root, path + ".z_u");
        s.z_v = cplx_at(root, path + ".z_v");
        s.xi = num_at(root, path + ".xi");
    } else {
        throw ConfigError(path + ".type: expected one of isotropic|axial|rotated");
    }
    return s;
}

// ---------------------------------------------------------------------------
// job config

struct JobConfig {
    std::string job;
    SideSpec side1, side2;
    cplx sw_z{};

    ModeSolveOptions solver;
    int n_x = 16, n_z = 16;
    std::string basis = "mode_matched";
    std::string sheet = "proper";

    std::string sweep_parameter;
    std::vector<double> grid;

    double x_min = -2.0, x_max = 2.0;
    int x_points = 401;

    std::string prefix = "run";
    bool plot = false;
    std::optional<double> frequency_hz;

    std::string golden = "fixtures/golden.csv";
    double selftest_tol = 1e-7;
    bool regenerate = false;
};

const char* kJobKinds[] = {"solve", "sweep", "field", "sw"};

std::vector<double> parse_grid(const json& root) {
    const json* g = find_path(root, "sweep.grid");
    if (g) {
        if (!g->is_array() || g->empty()) throw ConfigError("sweep.grid: expected a non-empty array");
        std::vector<double> out;
        for (size_t i = 0; i < g->size(); ++i) {
            if (!(*g)[i].is_number())
                throw ConfigError("sweep.grid[" + std::to_string(i) + "]: expected a number");
            out.push_back((*g)[i].get<double>());
        }
        return out;
    }
    double from = num_at(root, "sweep.from");
    double to = num_at(root, "sweep.to");
    int n = int_or(root, "sweep.points", 0);
    if (n < 2) throw ConfigError("sweep.points: expected an integer >= 2");
    std::string spacing = str_or(root, "sweep.spacing", "linear");
    std::vector<double> out(static_cast<size_t>(n));
    if (spacing == "linear") {
        for (int i = 0; i < n; ++i) out[size_t(i)] = from + (to - from) * i / (n - 1);
    } else if (spacing == "geometric") {
        if (from * to <= 0.0)
            throw ConfigError("sweep.spacing: geometric spacing needs same-sign nonzero endpoints");
        double r = std::pow(to / from, 1.0 / (n - 1));
        double v = from;
        for (int i = 0; i < n; ++i, v *= r) out[size_t(i)] = v;
        out.back() = to;
    } else {
        throw ConfigError("sweep.spacing: expected linear|geometric");
    }
    return out;
}

JobConfig parse_config(const json& root, const std::string& subcommand) {
    JobConfig c;
    c.job = str_or(root, "job", subcommand);
    bool known = false;
    for (const char* k : kJobKinds) known = known || c.job == k;
    if (c.job != "selftest" && !known)
        throw ConfigError("job: expected one of solve|sweep|field|sw|selftest");
    if (c.job != subcommand)
        throw ConfigError("job: config says '" + c.job + "' but the '" + subcommand +
                          "' subcommand was invoked");
    for (const char* k : std::vector<const char*>{"sweep", "field", "sw"})
        if (find_path(root, k) && c.job != k)
            throw ConfigError(std::string(k) + ": block not allowed for job '" + c.job + "'");

    if (c.job == "sw") {
        c.sw_z = cplx_at(root, "sw.z");
    } else if (c.job != "selftest") {
        c.side1 = parse_side(root, "structure.side1");
        c.side2 = parse_side(root, "structure.side2");

        c.n_x = int_or(root, "solver.n_x", 16);
        c.n_z = int_or(root, "solver.n_z", 16);
        if (c.n_x < 1 || c.n_x > max_basis_order || c.n_z < 1 || c.n_z > max_basis_order)
            throw ConfigError("solver.n_x: expected 1.." + std::to_string(max_basis_order));
        c.basis = str_or(root, "solver.basis", "mode_matched");
        ModeSolveOptions& o = c.solver;
        o.n_x = c.n_x;
        o.n_z = c.n_z;
        if (c.basis == "mode_matched") {
            o.strategy = BasisStrategy::ModeMatched;
        } else if (c.basis == "fixed_half") {
            o.strategy = BasisStrategy::FixedHalf;
        } else if (c.basis == "user_value") {
            o.strategy = BasisStrategy::UserValue;
        } else {
            throw ConfigError("solver.basis: expected mode_matched|fixed_half|user_value");
        }
        o.a_user = cplx_or(root, "solver.a", cplx(0.5, 0.0));
        c.sheet = str_or(root, "solver.sheet", "proper");
        if (c.sheet == "proper") {
            o.sheet = Sheet::Proper;
        } else if (c.sheet == "improper") {
            o.sheet = Sheet::Improper;
        } else {
            throw ConfigError("solver.sheet: expected proper|improper");
        }
        o.root.seed = cplx_at(root, "solver.seed");
        o.root.window_beta = num_or(root, "solver.window_beta", 0.2);
        o.root.window_alpha = num_or(root, "solver.window_alpha", 0.2);
        o.root.tol = num_or(root, "solver.tol", 1e-10);
        o.root.max_outer = int_or(root, "solver.max_outer", 12);
        o.root.pade_samples = int_or(root, "solver.pade_samples", 8);
        o.bound_real_axis_first = bool_or(root, "solver.bound_real_axis_first", false);
        o.quad.rel_tol = num_or(root, "solver.quadrature.rel_tol", 1e-10);
        o.quad.max_levels = int_or(root, "solver.quadrature.max_levels", 10);
        o.quad.truncation = num_or(root, "solver.quadrature.truncation", 10.0);
        o.quad.proximity_threshold = num_or(root, "solver.quadrature.proximity_threshold", 0.5);
    }

    if (c.job == "sweep") {
        c.sweep_parameter = str_or(root, "sweep.parameter", "");
        c.grid = parse_grid(root);
    }
    if (c.job == "field") {
        c.x_min = num_or(root, "field.x_min", -2.0);
        c.x_max = num_or(root, "field.x_max", 2.0);
        c.x_points = int_or(root, "field.points", 401);
        if (!(c.x_max > c.x_min)) throw ConfigError("field.x_max: expected x_max > x_min");
        if (c.x_points < 2) throw ConfigError("field.points: expected an integer >= 2");
    }
    if (c.job == "selftest") {
        c.golden = str_or(root, "golden", "fixtures/golden.csv");
        c.selftest_tol = num_or(root, "tolerance", 1e-7);
        c.regenerate = bool_or(root, "regenerate", false);
    }

    c.prefix = str_or(root, "output.prefix", "run");
    c.plot = bool_or(root, "output.plot", false);
    if (find_path(root, "frequency_hz")) {
        double f = num_at(root, "frequency_hz");
        if (!(f > 0.0)) throw ConfigError("frequency_hz: expected a positive number");
        c.frequency_hz = f;
    }
    return c;
}

// sweep families: how a scalar parameter deforms the base structure
std::function<StructureSpec(double)> sweep_family(const JobConfig& c) {
    const std::string& p = c.sweep_parameter;
    SideSpec s1 = c.side1, s2 = c.side2;
    if (p == "z2_real") {
        if (s2.type != "isotropic")
            throw ConfigError("sweep.parameter: z2_real needs an isotropic side2");
        return [s1, s2](double v) {
            StructureSpec st;
            st.y1 = s1.build();
            st.y2 = isotropic_admittance(cplx(v, s2.z.imag()));
            return st;
        };
    }
    if (p == "z2_capacitive_reactance") {
        if (s2.type != "isotropic")
            throw ConfigError("sweep.parameter: z2_capacitive_reactance needs an isotropic side2");
        return [s1](double v) {
            StructureSpec st;
            st.y1 = s1.build();
            st.y2 = isotropic_admittance(cplx(0.0, -v));
            return st;
        };
    }
    if (p == "z1_impedance_split" || p == "z1_admittance_split") {
        cplx zz0, xx0;
        if (s1.type == "isotropic") {
            zz0 = xx0 = s1.z;
        } else if (s1.type == "axial") {
            zz0 = s1.z_zz;
            xx0 = s1.z_xx;
        } else {
            throw ConfigError("sweep.parameter: " + p + " needs an isotropic or axial side1");
        }
        const bool admittance = p == "z1_admittance_split";
        return [=](double v) {
            StructureSpec st;
            const cplx d(0.0, v);
            if (admittance) {
                cplx yzz = 1.0 / zz0 - d, yxx = 1.0 / xx0 + d;
                st.y1 = axial_admittance(1.0 / yzz, 1.0 / yxx);
            } else {
                st.y1 = axial_admittance(zz0 - d, xx0 + d);
            }
            st.y2 = s2.build();
            return st;
        };
    }
    if (p == "z1_rotation_angle") {
        if (s1.type != "rotated")
            throw ConfigError("sweep.parameter: z1_rotation_angle needs a rotated side1");
        return [s1, s2](double v) {
            StructureSpec st;
            st.y1 = rotated_axial_admittance(s1.z_u, s1.z_v, v);
            st.y2 = s2.build();
            return st;
        };
    }
    throw ConfigError(
        "sweep.parameter: expected one of z2_real|z2_capacitive_reactance|z1_impedance_split|"
        "z1_admittance_split|z1_rotation_angle");
}

// ---------------------------------------------------------------------------
// output helpers

std::string fmt(double v) {
    if (v == 0.0) v = 0.0;  // normalize negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string sanitize(std::string s) {
    for (char& ch : s)
        if (ch == ',' || ch == '\n') ch = ';';
    return s;
}

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
}

std::string dispersion_csv(const std::vector<ModePoint>& pts) {
    std::string s = "param,beta_hat,alpha_hat,sigma_min,status\n";
    for (const ModePoint& p : pts)
        s += fmt(p.param) + "," + fmt(p.kz_hat.real()) + "," + fmt(-p.kz_hat.imag()) + "," +
             fmt(p.sigma_min) + "," + sanitize(p.status) + "\n";
    return s;
}

std::string field_csv(const FieldTable& t) {
    std::string s = "x_over_lambda0,re_ex,im_ex,re_ez,im_ez,re_jsx,im_jsx,re_jsz,im_jsz\n";
    for (const FieldSample& f : t.samples)
        s += fmt(f.x_over_lambda0) + "," + fmt(f.e_x.real()) + "," + fmt(f.e_x.imag()) + "," +
             fmt(f.e_z.real()) + "," + fmt(f.e_z.imag()) + "," + fmt(f.j_sx.real()) + "," +
             fmt(f.j_sx.imag()) + "," + fmt(f.j_sz.real()) + "," + fmt(f.j_sz.imag()) + "\n";
    return s;
}

void print_point(const ModePoint& p, bool with_param) {
    std::string line = "point ";
    if (with_param) line += "param=" + fmt(p.param) + " ";
    line += "beta_hat=" + fmt(p.kz_hat.real()) + " alpha_hat=" + fmt(-p.kz_hat.imag()) +
            " sigma_min=" + fmt(p.sigma_min) + " status=" + p.status;
    std::printf("%s\n", line.c_str());
}

// ---------------------------------------------------------------------------
// SVG plotting

struct Series {
    std::vector<double> x, y;
    const char* color;
    std::string label;
};

struct Panel {
    double x0, y0, w, h;  // pixel box of the data area
    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;

    double px(double x) const { return x0 + (x - xlo) / (xhi - xlo) * w; }
    double py(double y) const { return y0 + h - (y - ylo) / (yhi - ylo) * h; }
};

void expand(double& lo, double& hi) {
    if (!(hi > lo)) {
        double pad = std::max(1e-12, std::abs(lo) * 1e-3 + 1e-9);
        lo -= pad;
        hi += pad;
    } else {
        double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
}

double nice_step(double range) {
    double raw = range / 4.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) return m * mag;
    return 10.0 * mag;
}

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void draw_panel(std::string& svg, Panel& p, const std::vector<Series>& series,
                const std::string& xlabel, const std::string& ylabel) {
    bool any = false;
    for (const Series& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!any) {
                p.xlo = p.xhi = s.x[i];
                p.ylo = p.yhi = s.y[i];
                any = true;
            }
            p.xlo = std::min(p.xlo, s.x[i]);
            p.xhi = std::max(p.xhi, s.x[i]);
            p.ylo = std::min(p.ylo, s.y[i]);
            p.yhi = std::max(p.yhi, s.y[i]);
        }
    if (!any) throw std::runtime_error("plot input has no finite data");
    expand(p.xlo, p.xhi);
    expand(p.ylo, p.yhi);

    svg += "<rect x=\"" + coord(p.x0) + "\" y=\"" + coord(p.y0) + "\" width=\"" + coord(p.w) +
           "\" height=\"" + coord(p.h) + "\" fill=\"none\" stroke=\"#888888\"/>\n";
    double xs = nice_step(p.xhi - p.xlo), ys = nice_step(p.yhi - p.ylo);
    for (double t = std::ceil(p.xlo / xs) * xs; t <= p.xhi + 1e-9 * xs; t += xs) {
        svg += "<line x1=\"" + coord(p.px(t)) + "\" y1=\"" + coord(p.y0 + p.h) + "\" x2=\"" +
               coord(p.px(t)) + "\" y2=\"" + coord(p.y0 + p.h + 5) + "\" stroke=\"#888888\"/>\n";
        svg += "<text x=\"" + coord(p.px(t)) + "\" y=\"" + coord(p.y0 + p.h + 18) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" + fmt(t) +
               "</text>\n";
    }
    for (double t = std::ceil(p.ylo / ys) * ys; t <= p.yhi + 1e-9 * ys; t += ys) {
        svg += "<line x1=\"" + coord(p.x0 - 5) + "\" y1=\"" + coord(p.py(t)) + "\" x2=\"" +
               coord(p.x0) + "\" y2=\"" + coord(p.py(t)) + "\" stroke=\"#888888\"/>\n";
        svg += "<text x=\"" + coord(p.x0 - 8) + "\" y=\"" + coord(p.py(t) + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" + fmt(t) +
               "</text>\n";
    }
    svg += "<text x=\"" + coord(p.x0 + p.w / 2) + "\" y=\"" + coord(p.y0 + p.h + 34) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" + xlabel +
           "</text>\n";
    svg += "<text x=\"" + coord(p.x0 - 52) + "\" y=\"" + coord(p.y0 + p.h / 2) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 " +
           coord(p.x0 - 52) + " " + coord(p.y0 + p.h / 2) + ")\">" + ylabel + "</text>\n";

    int li = 0;
    for (const Series& s : series) {
        std::string pts;
        size_t n = 0;
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            pts += coord(p.px(s.x[i])) + "," + coord(p.py(s.y[i])) + " ";
            ++n;
        }
        if (n >= 2)
            svg += "<polyline fill=\"none\" stroke=\"" + std::string(s.color) +
                   "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        if (n <= 50)
            for (size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                svg += "<circle cx=\"" + coord(p.px(s.x[i])) + "\" cy=\"" + coord(p.py(s.y[i])) +
                       "\" r=\"3\" fill=\"" + std::string(s.color) + "\"/>\n";
            }
        svg += "<text x=\"" + coord(p.x0 + p.w - 8) + "\" y=\"" +
               coord(p.y0 + 16 + 16 * li) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\" fill=\"" +
               s.color + "\">" + s.label + "</text>\n";
        ++li;
    }
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

double cell_num(const std::string& s) {
    try {
        return std::stod(s);
    } catch (...) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

// Renders `results_csv` next to itself as a .svg; `kind` is dispersion|field.
fs::path emit_plot(const fs::path& results_csv, const std::string& kind,
                   std::optional<double> frequency_hz) {
    auto rows = read_csv(results_csv);
    if (rows.size() < 2)
        throw std::runtime_error("plot input has no data rows: " + results_csv.string());
    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"560\" "
        "viewBox=\"0 0 800 560\">\n<rect width=\"800\" height=\"560\" fill=\"#ffffff\"/>\n";

    if (kind == "dispersion") {
        Series beta{{}, {}, "#1f77b4", "beta_hat"}, alpha{{}, {}, "#d62728", "alpha_hat"};
        for (size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].size() < 5 || rows[i][4] != "ok") continue;
            beta.x.push_back(cell_num(rows[i][0]));
            beta.y.push_back(cell_num(rows[i][1]));
            alpha.x.push_back(cell_num(rows[i][0]));
            alpha.y.push_back(cell_num(rows[i][2]));
        }
        if (beta.x.empty())
            throw std::runtime_error("plot input has no usable rows: " + results_csv.string());
        Panel p{70, 20, 710, 495};
        draw_panel(svg, p, {beta, alpha}, "parameter", "normalized wavenumber");
    } else if (kind == "field") {
        double xscale = 1.0;
        std::string xlabel = "x / lambda0";
        if (frequency_hz) {
            xscale = c0_m_s / *frequency_hz;
            xlabel = "x [m]";
        }
        Series mx{{}, {}, "#1f77b4", "log10 |e_x|"}, mz{{}, {}, "#d62728", "log10 |e_z|"};
        Series px_{{}, {}, "#1f77b4", "arg e_x [deg]"}, pz{{}, {}, "#d62728", "arg e_z [deg]"};
        for (size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].size() < 9) continue;
            double x = cell_num(rows[i][0]) * xscale;
            cplx ex(cell_num(rows[i][1]), cell_num(rows[i][2]));
            cplx ez(cell_num(rows[i][3]), cell_num(rows[i][4]));
            if (!std::isfinite(ex.real()) || !std::isfinite(ez.real())) continue;
            mx.x.push_back(x);
            mx.y.push_back(std::log10(std::max(std::abs(ex), 1e-12)));
            mz.x.push_back(x);
            mz.y.push_back(std::log10(std::max(std::abs(ez), 1e-12)));
            px_.x.push_back(x);
            px_.y.push_back(std::arg(ex) * 180.0 / pi);
            pz.x.push_back(x);
            pz.y.push_back(std::arg(ez) * 180.0 / pi);
        }
        if (mx.x.empty())
            throw std::runtime_error("plot input has no usable rows: " + results_csv.string());
        Panel top{70, 20, 710, 215}, bot{70, 300, 710, 215};
        draw_panel(svg, top, {mx, mz}, xlabel, "log10 |e|");
        draw_panel(svg, bot, {px_, pz}, xlabel, "phase [deg]");
    } else {
        throw std::runtime_error("plot kind must be dispersion|field");
    }
    svg += "</svg>\n";
    fs::path out = results_csv;
    out.replace_extension(".svg");
    write_text(out, svg);
    return out;
}

// ---------------------------------------------------------------------------
// effective-config echo (defaults filled; reusable as an input config)

json echo_config(const JobConfig& c) {
    json j;
    j["job"] = c.job;
    if (c.job == "sw") {
        j["sw"]["z"] = cplx_json(c.sw_z);
    } else {
        j["structure"]["side1"] = c.side1.echo();
        j["structure"]["side2"] = c.side2.echo();
        const ModeSolveOptions& o = c.solver;
        j["solver"]["n_x"] = c.n_x;
        j["solver"]["n_z"] = c.n_z;
        j["solver"]["basis"] = c.basis;
        j["solver"]["a"] = cplx_json(o.a_user);
        j["solver"]["sheet"] = c.sheet;
        j["solver"]["seed"] = cplx_json(o.root.seed);
        j["solver"]["window_beta"] = o.root.window_beta;
        j["solver"]["window_alpha"] = o.root.window_alpha;
        j["solver"]["tol"] = o.root.tol;
        j["solver"]["max_outer"] = o.root.max_outer;
        j["solver"]["pade_samples"] = o.root.pade_samples;
        j["solver"]["bound_real_axis_first"] = o.bound_real_axis_first;
        j["solver"]["quadrature"]["rel_tol"] = o.quad.rel_tol;
        j["solver"]["quadrature"]["max_levels"] = o.quad.max_levels;
        j["solver"]["quadrature"]["truncation"] = o.quad.truncation;
        j["solver"]["quadrature"]["proximity_threshold"] = o.quad.proximity_threshold;
    }
    if (c.job == "sweep") {
        j["sweep"]["parameter"] = c.sweep_parameter;
        j["sweep"]["grid"] = c.grid;
    }
    if (c.job == "field") {
        j["field"]["x_min"] = c.x_min;
        j["field"]["x_max"] = c.x_max;
        j["field"]["points"] = c.x_points;
    }
    j["output"]["prefix"] = c.prefix;
    j["output"]["plot"] = c.plot;
    if (c.frequency_hz) j["frequency_hz"] = *c.frequency_hz;
    return j;
}

// ---------------------------------------------------------------------------
// selftest fixture suite: golden values come from the independent oracles,
// the recomputation uses the production pipeline

struct Fixture {
    std::string name;
    StructureSpec structure;
    cplx kz;
};

std::vector<Fixture> fixture_set() {
    auto iso = [](cplx z1, cplx z2) {
        StructureSpec s;
        s.y1 = isotropic_admittance(z1);
        s.y2 = isotropic_admittance(z2);
        return s;
    };
    const double r3 = std::sqrt(3.0);
    const cplx z1(0.0, 1.0 / r3), z2(0.0, -r3);
    std::vector<Fixture> f;
    f.push_back({"bound_kz1.3", iso(z1, z2), cplx(1.3, 0.0)});
    f.push_back({"bound_kz1.5", iso(z1, z2), cplx(1.5, 0.0)});
    f.push_back({"bound_kz2.0", iso(z1, z2), cplx(2.0, 0.0)});
    f.push_back({"leaky", iso(cplx(0.0, -0.5), cplx(0.1, -0.5)), cplx(1.548, -0.111)});
    StructureSpec rot0, rot45;
    rot0.y1 = rotated_axial_admittance(cplx(0, -(r3 + 1)), cplx(0, -(r3 - 1)), 0.0);
    rot45.y1 = rotated_axial_admittance(cplx(0, -(r3 + 1)), cplx(0, -(r3 - 1)), pi / 4);
    rot0.y2 = rot45.y2 = isotropic_admittance(z1);
    f.push_back({"rotated_xi0", rot0, cplx(2.2, 0.0)});
    f.push_back({"rotated_xi45", rot45, cplx(2.2, -0.05)});
    return f;
}

std::string fixture_inputs(const Fixture& f) {
    auto z1 = impedance_entries(f.structure.y1), z2 = impedance_entries(f.structure.y2);
    std::string s = f.name;
    for (const cplx& v : {z1[0], z1[1], z1[2], z1[3], z2[0], z2[1], z2[2], z2[3], f.kz})
        s += "," + fmt(v.real()) + "," + fmt(v.imag());
    return s;
}

// One report per fixture entry; when `use_oracle` the value comes from the
// independent implementations (golden generation), otherwise from the
// production pipeline (selftest comparison).
reference::OracleReport compute_entries(bool use_oracle) {
    reference::OracleReport rep;
    const double kx_probe = 0.7;
    for (const Fixture& f : fixture_set()) {
        const std::string inputs = fixture_inputs(f);
        GreenDyadic gd =
            use_oracle ? reference::green_oracle(f.structure.y1, cplx(kx_probe, 0.0), f.kz, Sheet::Proper)
                       : green_ee(f.structure.y1, cplx(kx_probe, 0.0), f.kz, Sheet::Proper);
        std::array<cplx, 4> g = {gd.gzz, gd.gzx, gd.gxz, gd.gxx};
        const char* gn[] = {"gzz", "gzx", "gxz", "gxx"};
        for (int i = 0; i < 4; ++i) rep.add(f.name + "_" + gn[i] + "_kx0.7", inputs, g[size_t(i)]);

        BasisSpec bs = BasisSpec::user_value(2, 2, cplx(0.5, 0.0));
        if (use_oracle) {
            Eigen::MatrixXcd m = reference::dense_assemble(f.structure, f.kz, bs, Sheet::Proper, 1e-10);
            rep.add(f.name + "_mom_xx_00", inputs, m(0, 0));
            rep.add(f.name + "_mom_zz_01", inputs, m(2, 3));
        } else {
            MoMSystem sys = assemble(f.structure, f.kz, bs, Sheet::Proper, {});
            rep.add(f.name + "_mom_xx_00", inputs, sys.matrix(0, 0));
            rep.add(f.name + "_mom_zz_01", inputs, sys.matrix(2, 3));
        }

        auto zs = impedance_entries(f.structure.y1);
        if (f.structure.y1.is_isotropic()) {
            if (use_oracle) {
                auto sw = reference::closed_form_sw(zs[0]);
                if (sw) rep.add(f.name + "_sw1", inputs, sw->k_sw);
            } else {
                auto roots = uniform_sw_wavenumbers(f.structure.y1);
                if (!roots.empty()) rep.add(f.name + "_sw1", inputs, roots.front());
            }
        }
    }
    return rep;
}

int run_selftest(const JobConfig& c, const fs::path& out_dir, bool verbose) {
    if (c.regenerate) {
        reference::OracleReport rep = compute_entries(true);
        reference::write_golden(rep, c.golden);
        std::printf("wrote %zu golden entries to %s\n", rep.entries.size(), c.golden.c_str());
        return 0;
    }
    reference::OracleReport golden = reference::read_golden(c.golden);
    reference::OracleReport now = compute_entries(false);
    int failures = 0;
    for (const auto& e : now.entries) {
        const reference::OracleEntry* g = golden.find(e.name);
        std::string verdict;
        if (!g) {
            verdict = "MISSING";
            ++failures;
        } else if (g->digest != e.digest) {
            verdict = "INPUTS-CHANGED";
            ++failures;
        } else {
            double dev = std::abs(e.value - g->value) /
                         std::max({std::abs(g->value), std::abs(e.value), 1e-300});
            bool pass = dev <= c.selftest_tol;
            verdict = (pass ? "PASS dev=" : "FAIL dev=") + fmt(dev);
            if (!pass) ++failures;
        }
        std::printf("%-28s %s\n", e.name.c_str(), verdict.c_str());
    }
    if (verbose)
        std::printf("golden file: %s (%zu entries), tolerance %s\n", c.golden.c_str(),
                    golden.entries.size(), fmt(c.selftest_tol).c_str());
    (void)out_dir;
    std::printf("selftest: %d/%zu failed\n", failures, now.entries.size());
    return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// job runners

int run_sw(const JobConfig& c, const fs::path& out_dir) {
    std::string csv = "polarization,beta_hat,alpha_hat,source\n";
    auto sw = reference::closed_form_sw(c.sw_z);
    if (sw) {
        const char* pol = sw->pol == reference::Polarization::TM ? "tm" : "te";
        csv += std::string(pol) + "," + fmt(sw->k_sw.real()) + "," + fmt(-sw->k_sw.imag()) +
               ",closed_form\n";
        std::printf("sw %s beta_hat=%s alpha_hat=%s closed_form\n", pol,
                    fmt(sw->k_sw.real()).c_str(), fmt(-sw->k_sw.imag()).c_str());
    }
    auto roots = uniform_sw_wavenumbers(isotropic_admittance(c.sw_z));
    for (const cplx& k : roots) {
        const char* pol = "unknown";
        if (sw && std::abs(k - sw->k_sw) < 1e-6)
            pol = sw->pol == reference::Polarization::TM ? "tm" : "te";
        csv += std::string(pol) + "," + fmt(k.real()) + "," + fmt(-k.imag()) + ",numeric\n";
        std::printf("sw %s beta_hat=%s alpha_hat=%s numeric\n", pol, fmt(k.real()).c_str(),
                    fmt(-k.imag()).c_str());
    }
    write_text(out_dir / (c.prefix + "_sw.csv"), csv);
    return 0;
}

int run_solve(const JobConfig& c, const fs::path& out_dir) {
    StructureSpec st;
    st.y1 = c.side1.build();
    st.y2 = c.side2.build();
    ModePoint pt = solve_mode(st, c.solver);
    print_point(pt, false);
    fs::path csv = out_dir / (c.prefix + "_root.csv");
    write_text(csv, dispersion_csv({pt}));
    if (c.plot) emit_plot(csv, "dispersion", c.frequency_hz);
    return pt.ok() ? 0 : 1;
}

int run_sweep(const JobConfig& c, const fs::path& out_dir) {
    auto family = sweep_family(c);
    std::vector<ModePoint> pts = sweep(family, c.grid, c.solver);
    int failed = 0;
    for (const ModePoint& p : pts) {
        print_point(p, true);
        if (!p.ok()) ++failed;
    }
    fs::path csv = out_dir / (c.prefix + "_dispersion.csv");
    write_text(csv, dispersion_csv(pts));
    if (c.plot) emit_plot(csv, "dispersion", c.frequency_hz);
    return failed == 0 ? 0 : 2;
}

int run_field(const JobConfig& c, const fs::path& out_dir, int threads) {
    StructureSpec st;
    st.y1 = c.side1.build();
    st.y2 = c.side2.build();
    ModeSolveResult res = solve_mode_full(st, c.solver);
    print_point(res.point, false);
    write_text(out_dir / (c.prefix + "_root.csv"), dispersion_csv({res.point}));
    if (!res.point.ok()) return 1;

    ModeSolution sol = make_mode_solution(st, res, c.solver.sheet);
    std::vector<double> xs(static_cast<size_t>(c.x_points));
    for (int i = 0; i < c.x_points; ++i)
        xs[size_t(i)] = c.x_min + (c.x_max - c.x_min) * i / (c.x_points - 1);
    FieldConfig fc;
    fc.quad = c.solver.quad;
    fc.threads = threads;
    FieldTable table = tangential_field(sol, xs, fc);
    fs::path csv = out_dir / (c.prefix + "_field.csv");
    write_text(csv, field_csv(table));

    DiagnosticsReport d = diagnostics(sol, table, fc);
    json dj;
    dj["all_nan"] = d.all_nan;
    dj["jump_ratio"] = cplx_json(d.jump_ratio);
    dj["ez_gap"] = d.ez_gap;
    dj["max_near_edge"] = d.max_near_edge;
    dj["finite_near_edge"] = d.finite_near_edge;
    dj["decay_pos"] = {{"rate", d.decay_pos.rate},
                       {"window_lo", d.decay_pos.window_lo},
                       {"window_hi", d.decay_pos.window_hi},
                       {"samples", d.decay_pos.samples},
                       {"ok", d.decay_pos.ok}};
    dj["decay_neg"] = {{"rate", d.decay_neg.rate},
                       {"window_lo", d.decay_neg.window_lo},
                       {"window_hi", d.decay_neg.window_hi},
                       {"samples", d.decay_neg.samples},
                       {"ok", d.decay_neg.ok}};
    dj["phase_slope"] = d.phase_slope;
    dj["phase_r2"] = d.phase_r2;
    dj["quadrature_dev_deg"] = d.quadrature_dev_deg;
    dj["current_field_consistency"] = current_field_consistency(sol, table);
    write_text(out_dir / (c.prefix + "_diagnostics.json"), dj.dump(2) + "\n");

    if (c.plot) emit_plot(csv, "field", c.frequency_hz);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"line waves at the junction of two impedance half-planes"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    int threads = 0;
    bool verbose = false;
    std::vector<CLI::App*> subs;
    for (const char* name : {"solve", "sweep", "field", "sw", "selftest"}) {
        CLI::App* s = app.add_subcommand(name);
        s->add_option("--config", config_path, "JSON job configuration");
        s->add_option("--out", out_dir, "output directory");
        s->add_option("--threads", threads, "worker threads for field reconstruction");
        s->add_flag("--verbose", verbose, "extra progress output");
        subs.push_back(s);
    }
    CLI11_PARSE(app, argc, argv);
    std::string sub = app.get_subcommands().front()->get_name();

    if (threads <= 0) {
        if (const char* env = std::getenv("LINEWAVE_THREADS")) threads = std::atoi(env);
        if (threads <= 0) threads = 1;
    }

    try {
        json root = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot read config " + config_path);
            try {
                root = json::parse(in);
            } catch (const json::exception& e) {
                throw ConfigError("config parse: " + std::string(e.what()));
            }
        } else if (sub != "selftest") {
            throw ConfigError("--config is required for the " + sub + " subcommand");
        }
        JobConfig cfg = parse_config(root, sub);

        fs::path out(out_dir);
        fs::create_directories(out);
        if (cfg.job != "selftest") {
            write_text(out / (cfg.prefix + "_config.json"), echo_config(cfg).dump(2) + "\n");
            if (verbose) std::printf("effective config: %s_config.json\n", cfg.prefix.c_str());
        }

        if (sub == "selftest") return run_selftest(cfg, out, verbose);
        if (sub == "sw") return run_sw(cfg, out);
        if (sub == "solve") return run_solve(cfg, out);
        if (sub == "sweep") return run_sweep(cfg, out);
        return run_field(cfg, out, threads);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
