// cylinder-cm: batch driver for the center-manifold pipelines.
//
//   cylinder-cm waterwave --preset homogeneous --eps 0.01 --out run/
//   cylinder-cm conjugate --rho 25/52 --omega -9/10
//   cylinder-cm verify
//
// The JSON report goes to stdout. Files are written only under --out.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "cylcm/cylcm.hpp"

#ifndef CYLCM_PRESET_DIR
#define CYLCM_PRESET_DIR "presets"
#endif

namespace fs = std::filesystem;
using namespace cylcm;

namespace {

enum Exit { ok = 0, config_error = 2, numerical_error = 3, acceptance_failure = 4 };

struct Flags {
    std::string config, preset, eps, grid, out, rho, omega, h0, c0, beta, lambda1, fault;
    std::vector<std::string> formats;
    bool eps_given = false;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) fail_config("cannot read " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path preset_dir() {
    if (const char* env = std::getenv("CYLCM_PRESETS")) return env;
    return CYLCM_PRESET_DIR;
}

RunConfig build_config(const std::string& app, const Flags& fl) {
    RunConfig cfg(app);
    if (!fl.preset.empty()) {
        fs::path p = preset_dir() / (fl.preset + ".ini");
        if (!fs::exists(p)) fail_config("unknown preset '" + fl.preset + "' (looked in " + preset_dir().string() + ")");
        cfg.load_ini(slurp(p), p.string());
    }
    if (!fl.config.empty()) cfg.load_ini(slurp(fl.config), fl.config);
    auto put = [&](const std::string& sec, const std::string& key, const std::string& v) {
        if (!v.empty()) cfg.set(sec, key, v);
    };
    if (fl.eps_given) cfg.set("run", "eps", fl.eps);
    put("run", "grid", fl.grid);
    if (!fl.formats.empty()) {
        std::string joined;
        for (const auto& f : fl.formats) joined += (joined.empty() ? "" : ",") + f;
        cfg.set("run", "format", joined);
    }
    put("water", "rho", fl.rho);
    put("water", "omega", fl.omega);
    put("water", "h0", fl.h0);
    put("water", "c0", fl.c0);
    if (!fl.beta.empty()) cfg.set(app == "spectrum" ? "spectrum" : "fkpp", "beta", fl.beta);
    put("fkpp", "lambda1", fl.lambda1);
    put("verify", "inject_dyn_fault", fl.fault);
    return cfg;
}

/// Artifact sink: nothing touches the disk unless an output directory was given.
class Output {
public:
    Output(const std::string& dir, const RunConfig& cfg) {
        if (!dir.empty()) dir_ = dir;
        std::stringstream ss(cfg.text("run.format", "csv,json,svg"));
        std::string f;
        while (std::getline(ss, f, ',')) {
            f.erase(0, f.find_first_not_of(' '));
            f.erase(f.find_last_not_of(' ') + 1);
            if (f.empty()) continue;
            if (f != "csv" && f != "json" && f != "svg") fail_config("unknown format '" + f + "'");
            formats_.insert(f);
        }
    }

    void emit(const std::string& name, const std::string& format, const std::string& text) {
        if (!dir_ || !formats_.count(format)) return;
        write_file(*dir_ / name, text);
        written_.push_back(name);
    }
    const std::vector<std::string>& written() const { return written_; }

private:
    std::optional<fs::path> dir_;
    std::set<std::string> formats_;
    std::vector<std::string> written_;
};

std::string eps_tag(double e) {
    char b[32];
    std::snprintf(b, sizeof b, "%g", e);
    return b;
}

int grid_of(const RunConfig& cfg) {
    int n = cfg.integer("run.grid", 512);
    if (n < 16 || n % 2) fail_config("grid must be an even integer >= 16, got " + std::to_string(n));
    return n;
}

std::vector<double> eps_list(const RunConfig& cfg, std::vector<double> def) {
    auto l = cfg.list("run.eps");
    return l ? *l : def;
}

StepControl step_control(const RunConfig& cfg) {
    StepControl c;
    c.rtol = cfg.real("tolerances.rtol", c.rtol);
    c.atol = cfg.real("tolerances.atol", c.atol);
    return c;
}

Json tolerances(const RunConfig& cfg) {
    StepControl c = step_control(cfg);
    ConnectOptions co;
    return {{"rtol", c.rtol}, {"atol", c.atol}, {"eigen_tol", cfg.real("tolerances.eigen_tol", EigenOptions{}.residual_tol)},
            {"sink_tol", co.sink_tol}, {"seed_offset", co.seed_offset}, {"window", co.window}};
}

Json value_json(double v, const std::optional<Rational>& exact) {
    if (exact) return exact_json(*exact);
    return v;
}

std::string svg_orbit(const Orbit& o, const std::string& title) {
    Polyline l;
    double lo = 0, hi = 0;
    for (std::size_t i = 0; i < o.X.size(); ++i) {
        l.x.push_back(o.X[i]);
        l.y.push_back(o.Y[i][0]);
        lo = std::min(lo, o.Y[i][0]);
        hi = std::max(hi, o.Y[i][0]);
    }
    double pad = 0.05 * (hi - lo + 1e-300);
    return svg_plot({l}, o.X.front(), o.X.back(), lo - pad, hi + pad, title);
}

Table orbit_table(const Orbit& o, double eps, int q) {
    Table t{{"X", "x", "V", "W", "A"}, {}};
    double s = std::pow(std::abs(eps), q);
    for (std::size_t i = 0; i < o.X.size(); ++i)
        t.add({o.X[i], o.X[i] / std::abs(eps), o.Y[i][0], o.Y[i][1], s * o.Y[i][0]});
    return t;
}

Json psi_table_json(const PsiTable& t) {
    Json j = Json::object();
    for (const auto& [ix, f] : t.psi) {
        Json prof = Json::array();
        for (int m = 0; m <= f.degree(); ++m) prof.push_back(f.coeff(m));
        j[index_key(ix)] = {{"degree", f.degree()}, {"profiles", prof}};
    }
    return j;
}

// ------------------------------------------------------------------ spectrum

Json run_spectrum(const RunConfig& cfg, Output& out) {
    std::string family = cfg.text("spectrum.family", "elasticity");
    int n = grid_of(cfg), count = cfg.integer("spectrum.count", 4);
    if (count < 1) fail_config("spectrum.count must be positive");
    Json res;
    std::optional<BaseOperator> op;
    if (family == "elasticity") {
        double slope = cfg.real("spectrum.slope", -1.0);
        op.emplace(elasticity_operator(n, slope));
        res["slope"] = slope;
    } else if (family == "fkpp") {
        double beta = cfg.real("spectrum.beta", 1.0);
        auto cv = fkpp_critical(beta, n);
        op.emplace(fkpp_operator(n, cv.p, beta));
        res["beta"] = beta;
        res["rho0"] = cv.p;
    } else {
        fail_config("spectrum.family must be elasticity or fkpp, got '" + family + "'");
    }
    EigenOptions eo;
    eo.residual_tol = cfg.real("tolerances.eigen_tol", eo.residual_tol);
    auto pairs = eigen_lowest(*op, count, eo);
    Json nus = Json::array();
    Table t{{"y"}, {}};
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        nus.push_back({{"nu", pairs[k].nu}, {"nu_h", pairs[k].nu_h}, {"residual", pairs[k].residual}});
        t.header.push_back("nu" + std::to_string(k) + "=" + format_double(pairs[k].nu));
    }
    for (int i = 0; i <= op->n(); ++i) {
        std::vector<double> row{op->y(i)};
        for (const auto& p : pairs) row.push_back(p.phi[i]);
        t.add(row);
    }
    res["family"] = family;
    res["grid"] = n;
    res["eigenpairs"] = nus;
    out.emit("eigenpairs.csv", "csv", t.csv());
    std::vector<Polyline> lines;
    const char* colors[] = {"black", "red", "blue", "green", "orange", "purple"};
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        Polyline l;
        l.stroke = colors[k % 6];
        for (int i = 0; i <= op->n(); ++i) {
            l.x.push_back(op->y(i));
            l.y.push_back(pairs[k].phi[i]);
        }
        lines.push_back(l);
    }
    out.emit("eigenpairs.svg", "svg", svg_plot(lines, op->y(0), op->y(op->n()), -2, 2, "eigenfunctions"));
    return res;
}

// ---------------------------------------------------------------- elasticity

Json run_elasticity(const RunConfig& cfg, Output& out) {
    ElasticityParams p;
    p.b1 = cfg.real("elasticity.b1", p.b1);
    p.lambda2 = cfg.real("elasticity.lambda2", p.lambda2);
    p.b2 = cfg.real("elasticity.b2", p.b2);
    p.w1 = cfg.real("elasticity.w1", p.w1);
    p.grid = grid_of(cfg);
    auto table = expand_reduction(elasticity_spec(p));
    auto ode = from_table(AppKind::elasticity, table, elasticity_scaling());
    ode.reversible = true;
    ode.expected_equilibria = 3;
    auto shape = profile_shape(ode);
    Json res{{"coefficients",
              {{"f102", ode.coeff({1, 0, 2})}, {"f300", ode.coeff({3, 0, 0})}, {"f102_closed", p.b1 * p.lambda2},
               {"f300_closed", 0.75 * (p.b2 + 2 * p.w1)}}},
             {"profile", {{"kind", shape.kind == ProfileKind::front ? "front" : "pulse"}, {"a", shape.a}, {"kappa", shape.kappa}}}};
    out.emit("psi_table.json", "json", to_json_text(psi_table_json(table)));
    ConnectOptions co;
    co.ctl = step_control(cfg);
    Json runs = Json::array();
    for (double eps : eps_list(cfg, {0.05})) {
        if (eps == 0.0) fail_config("elasticity needs a nonzero amplitude");
        auto eq = equilibria(ode, eps).points;
        Connection c;
        if (shape.kind == ProfileKind::front) {
            c = connect(ode, eps, eq.front(), eq.back(), co);
        } else {
            auto z = std::find_if(eq.begin(), eq.end(), [](const Equilibrium& e) { return e.V == 0.0; });
            if (z == eq.end()) fail_num("rest point at the origin not found");
            c = connect(ode, eps, *z, *z, co);
        }
        double dev = 0.0;
        for (std::size_t i = 0; i < c.orbit.X.size(); ++i)
            dev = std::max(dev, std::abs(eps) * std::abs(c.orbit.Y[i][0] - truncated_profile(shape, c.orbit.X[i]).s.V));
        auto lin = linearize_along(ode, c.orbit);
        Json eqs = Json::array();
        for (const auto& e : eq) eqs.push_back({{"V", e.V}, {"kind", to_string(e.kind)}});
        runs.push_back({{"eps", eps}, {"equilibria", eqs}, {"kind", c.kind}, {"endpoint_error", c.endpoint_error},
                        {"tanh_deviation", dev}, {"tangent_residual", lin.tangent_residual}});
        out.emit("orbit_eps" + eps_tag(eps) + ".csv", "csv", orbit_table(c.orbit, eps, 1).csv());
        out.emit("orbit_eps" + eps_tag(eps) + ".svg", "svg", svg_orbit(c.orbit, "elasticity V(X)"));
    }
    res["runs"] = runs;
    return res;
}

// ---------------------------------------------------------------------- fkpp

Json run_fkpp(const RunConfig& cfg, Output& out) {
    FkppParams p;
    p.beta = cfg.real("fkpp.beta", p.beta);
    p.lambda1 = cfg.real("fkpp.lambda1", p.lambda1);
    p.rho2 = cfg.real("fkpp.rho2", p.rho2);
    p.grid = grid_of(cfg);
    auto red = assemble_fkpp(p);
    out.emit("psi_table.json", "json", to_json_text(psi_table_json(expand_reduction(fkpp_spec(p, red.rho0)))));
    Json res{{"rho0", red.rho0}, {"nu1", red.nu1}, {"sigma", red.sigma}, {"sigma_closed", fkpp_sigma(red.rho0)},
             {"coefficients", {{"f200", red.ode.coeff({2, 0, 0})}, {"f011", red.ode.coeff({0, 1, 1})},
                               {"f102", red.ode.coeff({1, 0, 2})}}}};
    ConnectOptions co;
    co.ctl = step_control(cfg);
    Json runs = Json::array();
    for (double eps : eps_list(cfg, {0.05})) {
        if (eps == 0.0) fail_config("fkpp needs a nonzero amplitude");
        auto eq = equilibria(red.ode, eps).points;
        const Equilibrium *sink = nullptr, *saddle = nullptr;
        for (const auto& e : eq) {
            if (e.kind == EqKind::sink) sink = &e;
            if (e.kind == EqKind::saddle) saddle = &e;
        }
        if (!sink || !saddle) fail_num("no saddle-sink pair at this amplitude (is lambda1 > 2?)");
        auto c = connect(red.ode, eps, *saddle, *sink, co);
        auto lin = linearize_along(red.ode, c.orbit);
        runs.push_back({{"eps", eps}, {"from", c.orbit.Y.front()[0]}, {"to", c.orbit.Y.back()[0]},
                        {"saddle", saddle->V}, {"sink", sink->V}, {"endpoint_error", c.endpoint_error},
                        {"in_triangle", c.in_triangle}, {"monotone", c.monotone},
                        {"tangent_residual", lin.tangent_residual}});
        out.emit("front_eps" + eps_tag(eps) + ".csv", "csv", orbit_table(c.orbit, eps, 2).csv());
        out.emit("front_eps" + eps_tag(eps) + ".svg", "svg", svg_orbit(c.orbit, "fkpp front V(X)"));
    }
    res["runs"] = runs;
    return res;
}

// ----------------------------------------------------------- water systems

struct Water {
    ConjugateSystem sys;
    BasePoint base;
};

Water water_from(const RunConfig& cfg, const Rational& fault = 0) {
    auto rho = cfg.rational("water.rho"), omega = cfg.rational("water.omega");
    if (!rho || !omega) fail_config("water.rho and water.omega are required (use --preset or --rho/--omega)");
    ConjugateSystem sys(*rho, *omega, fault);
    std::optional<double> c0;
    std::optional<Rational> c0x;
    if (cfg.has("water.c0")) {
        c0 = cfg.real("water.c0", 0.0);
        if (cfg.text("water.c0", "").find_first_of("eE") == std::string::npos) c0x = cfg.rational("water.c0");
    }
    auto base = base_point(sys, cfg.rational("water.h0"), c0, c0x);
    return {std::move(sys), base};
}

Json base_json(const Water& w) {
    return {{"rho", exact_json(w.sys.rho())}, {"omega", exact_json(w.sys.omega())},
            {"h0", value_json(w.base.h0, w.base.h0_exact)}, {"c0", value_json(w.base.c0, w.base.c0_exact)}};
}

WaterReduction reduce(const Water& w, double eps_max) {
    auto adm = check_admissibility(w.sys, w.base.h0, w.base.c0);
    if (!adm.bifurcation)
        fail_pre("base point is not a bifurcation point (residual " + format_double(adm.residual) + ")");
    if (!adm.nondegenerate) fail_pre("degenerate parameters: conjugate-flow Jacobian is singular");
    if (w.base.h0_exact && w.base.c0_exact) return assemble_waterwave(w.sys, *w.base.h0_exact, *w.base.c0_exact, eps_max);
    return assemble_waterwave(w.sys, w.base.h0, w.base.c0, eps_max);
}

Json admissibility_json(const AdmissibilityReport& a) {
    return {{"bifurcation", a.bifurcation}, {"residual", a.residual}, {"nondegenerate", a.nondegenerate},
            {"f300_positive", a.f300_positive}, {"critical_layer", a.critical_layer},
            {"det_h_hp", a.det_h_hp}, {"det_sum_c", a.det_sum_c}, {"det_hp_c", a.det_hp_c}};
}

// ----------------------------------------------------------------- waterwave

Json run_waterwave(const RunConfig& cfg, Output& out) {
    auto w = water_from(cfg);
    auto red = reduce(w, 0.0);
    const auto& k = red.coeffs;
    auto ex = [&](double v, auto member) -> Json {
        if (red.exact) return exact_json((*red.exact).*member);
        return v;
    };
    using WC = WaterCoefficients<Rational>;
    Json res{{"base", base_json(w)},
             {"admissibility", admissibility_json(check_admissibility(w.sys, w.base.h0, w.base.c0))},
             {"coefficients",
              {{"f300", ex(k.f300, &WC::f300)}, {"f201", ex(k.f201, &WC::f201)}, {"f102", ex(k.f102, &WC::f102)},
               {"s020", ex(k.s020, &WC::s020)}, {"a1", ex(k.a1, &WC::a1)}, {"lambda1_sq", ex(k.lambda1_sq, &WC::lambda1_sq)},
               {"hp1", ex(k.hp1, &WC::hp1)}, {"c1", ex(k.c1, &WC::c1)}, {"c2", ex(k.c2, &WC::c2)},
               {"identity_defect", k.f102 - 2 * k.f201 * k.f201 / (9 * k.f300)}}}};
    ConnectOptions co;
    co.ctl = step_control(cfg);
    Json runs = Json::array();
    for (double eps : eps_list(cfg, {0.01})) {
        auto f = reconstruct(w.sys, red, eps, co);
        auto r = residual(f);
        Json run{{"eps", eps}, {"h", f.h}, {"hp", f.hp}, {"c", f.c},
                 {"residuals", {{"laplace1", r.laplace1}, {"laplace2", r.laplace2},
                                {"kinematic_interface", r.kinematic_interface}, {"kinematic_walls", r.kinematic_walls},
                                {"dynamic", r.dynamic}}},
                 {"flow_force_drift", flow_force_drift(f)}};
        std::string tag = "_eps" + eps_tag(eps);
        double xw = std::isfinite(f.x_window()) ? f.x_window() : 10.0;
        Table field{{"x", "Y", "psi"}, {}};
        Table iface{{"x", "eta", "interface"}, {}};
        for (int i = 0; i <= 200; ++i) {
            double x = -xw + 2 * xw * i / 200;
            iface.add({x, f.eta(x), f.interface(x)});
            for (int j = 0; j <= 40; ++j) {
                double Y = j / 40.0;
                field.add({x, Y, f.psi(x, Y).psi});
            }
        }
        out.emit("interface" + tag + ".csv", "csv", iface.csv());
        out.emit("field" + tag + ".csv", "csv", field.csv());
        Polyline il;
        il.x = std::vector<double>(iface.rows.size());
        il.y = il.x;
        for (std::size_t i = 0; i < iface.rows.size(); ++i) {
            il.x[i] = iface.rows[i][0];
            il.y[i] = iface.rows[i][2];
        }
        std::vector<Polyline> plot{il};
        if (eps != 0.0) {
            auto m = monotonicity_check(f);
            run["monotonicity"] = {{"verdict", m.verdict}, {"eta_x_min", m.eta_x_min}, {"eta_x_max", m.eta_x_max}};
            double s0 = conserved_scaled(red.ode, eps, f.orbit.Y.front()[0], f.orbit.Y.front()[1]), drift = 0.0;
            for (const auto& y : f.orbit.Y) drift = std::max(drift, std::abs(conserved_scaled(red.ode, eps, y[0], y[1]) - s0));
            run["conserved_drift"] = drift;
            run["tangent_residual"] = linearize_along(red.ode, f.orbit).tangent_residual;
            out.emit("orbit" + tag + ".csv", "csv", orbit_table(f.orbit, eps, 1).csv());
            std::vector<double> seeds;
            try {
                auto cl = critical_layer(f);
                Table ct{{"x", "Yc"}, {}};
                for (std::size_t i = 0; i < cl.x.size(); ++i) ct.add({cl.x[i], cl.Y[i]});
                out.emit("critical_layer" + tag + ".csv", "csv", ct.csv());
                Polyline cp{cl.x, cl.Y, "red", 1.0};
                plot.push_back(cp);
                run["critical_layer"] = {{"upstream", cl.upstream}, {"sign_pattern", cl.sign_pattern}};
                auto eye = eye_bounds(f);
                double span = eye.upper - eye.lower;
                run["eye"] = {{"lower", eye.lower}, {"upper", eye.upper}, {"half_width", eye.half_width()},
                              {"half_width_asymptotic",
                               eye_half_width_asymptotic(w.base.h0, w.base.c0, w.sys.omega_d(), k.a1, eps)}};
                seeds = {eye.lower + 0.2 * span, eye.upper - 0.2 * span};
            } catch (const Error& e) {
                run["critical_layer"] = e.what();
            }
            for (double Y : {0.25, 0.5, 0.75, 0.95}) seeds.push_back(Y);
            Table st{{"id", "x", "Y"}, {}};
            Json lines = Json::array();
            double x20 = f.x_of(20.0);
            for (std::size_t s = 0; s < seeds.size(); ++s) {
                if (!(seeds[s] > 0 && seeds[s] < 1)) continue;
                auto sl = streamline(f, x20, seeds[s]);
                lines.push_back({{"seed_Y", seeds[s]}, {"label", sl.label}, {"level", sl.level}, {"has_turn", sl.has_turn},
                                 {"turn_offset", sl.turn_offset}});
                for (std::size_t i = 0; i < sl.x.size(); ++i) st.add({static_cast<double>(s), sl.x[i], sl.Y[i]});
                plot.push_back({sl.x, sl.Y, sl.label == "eye" ? "blue" : "gray", 0.8});
            }
            run["streamlines"] = lines;
            out.emit("streamlines" + tag + ".csv", "csv", st.csv());
        }
        out.emit("waterwave" + tag + ".svg", "svg", svg_plot(plot, -xw, xw, 0, 1, "interface, critical layer, streamlines"));
        runs.push_back(run);
    }
    res["runs"] = runs;
    return res;
}

// ----------------------------------------------------------------- conjugate

Json run_conjugate(const RunConfig& cfg, Output& out) {
    auto w = water_from(cfg);
    double eps_max = cfg.real("conjugate.eps_max", 0.02);
    auto adm = check_admissibility(w.sys, w.base.h0, w.base.c0);
    auto red = reduce(w, eps_max);
    const auto& b = red.branch;
    Json series{{"hp1", b.hp1}, {"hp2", b.hp2}, {"c1", b.c1}, {"c2", b.c2}};
    if (b.exact) {
        series = {{"hp1", exact_json(b.exact->hp1)}, {"hp2", exact_json(b.exact->hp2)}, {"c1", exact_json(b.exact->c1)},
                  {"c2", exact_json(b.exact->c2)}};
    }
    const double d = 1e-4;
    auto sp = solve_conjugate(w.sys, b.h0 + d, b.hp_series(d), b.c_series(d));
    auto sm = solve_conjugate(w.sys, b.h0 - d, b.hp_series(-d), b.c_series(-d));
    Table t{{"eps", "h", "hp", "c", "residual", "flow_force_gap"}, {}};
    double worst = 0.0, gap = 0.0;
    for (const auto& s : b.samples) {
        FlowState<double> st{s.h, s.hp, s.c, w.sys.rho_d(), w.sys.omega_d()};
        double g = std::abs(flow_force(st, Side::upstream) - flow_force(st, Side::downstream));
        t.add({s.eps, s.h, s.hp, s.c, s.residual, g});
        worst = std::max(worst, s.residual);
        gap = std::max(gap, g);
    }
    out.emit("branch.csv", "csv", t.csv());
    Polyline lh, lc;
    lc.stroke = "red";
    for (const auto& s : b.samples) {
        lh.x.push_back(s.eps);
        lh.y.push_back(s.hp);
        lc.x.push_back(s.eps);
        lc.y.push_back(s.c);
    }
    if (!b.samples.empty()) {
        double lo = 1e300, hi = -1e300;
        for (double v : lh.y) lo = std::min(lo, v), hi = std::max(hi, v);
        for (double v : lc.y) lo = std::min(lo, v), hi = std::max(hi, v);
        out.emit("branch.svg", "svg", svg_plot({lh, lc}, -eps_max, eps_max, lo - 0.05, hi + 0.05, "h+ (black), c (red)"));
    }
    const auto& cert = w.sys.certificate();
    return {{"base", base_json(w)},
            {"admissibility", admissibility_json(adm)},
            {"series", series},
            {"fd_slopes", {{"hp1", (sp.hp - sm.hp) / (2 * d)}, {"c1", (sp.c - sm.c) / (2 * d)}}},
            {"certificate", {{"exact", cert.exact}, {"reconstructs", cert.reconstructs}}},
            {"branch", {{"eps_max", eps_max}, {"samples", b.samples.size()}, {"max_residual", worst},
                        {"max_flow_force_gap", gap}}}};
}

// -------------------------------------------------------------------- verify

Json run_verify(const RunConfig& cfg, Output& out, bool& failed) {
    AcceptanceOptions o;
    if (auto f = cfg.rational("verify.inject_dyn_fault")) o.dyn_fault = *f;
    if (auto e = cfg.list("run.eps")) {
        if (e->empty()) fail_config("nothing to verify: the eps list is empty");
        if (e->size() < 2) fail_config("the residual-order check needs at least two amplitudes");
        o.residual_eps = *e;
    }
    o.seed = static_cast<std::uint64_t>(cfg.integer("verify.seed", static_cast<int>(o.seed)));
    o.draws = cfg.integer("verify.draws", o.draws);
    Json checks = Json::array();
    std::vector<int> failures;
    for (const auto& c : run_acceptance(o)) {
        checks.push_back(to_json(c));
        std::cerr << (c.pass ? "PASS " : "FAIL ") << c.id << " " << c.name << ": " << c.detail << "\n";
        if (!c.pass) failures.push_back(c.id);
    }
    failed = !failures.empty();
    Json res{{"checks", checks}, {"failures", failures}, {"all_pass", !failed}};
    out.emit("verify.json", "json", to_json_text(res));
    return res;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Center-manifold reduction pipelines for cylindrical domains"};
    app.require_subcommand(1);
    Flags fl;
    std::map<std::string, CLI::App*> subs;
    std::vector<CLI::Option*> eps_opts;
    const std::map<std::string, std::string> blurb{
        {"spectrum", "transverse eigenpairs of the elasticity or Robin operator"},
        {"elasticity", "reduced front and pulse for the elastic strip"},
        {"fkpp", "advected FKPP front on the Robin strip"},
        {"waterwave", "two-layer bore: coefficients, field, critical layer, cat's eye"},
        {"conjugate", "exact conjugate-flow branch and its series"},
        {"verify", "run all acceptance checks"}};
    for (const auto& name : applications()) {
        auto* s = app.add_subcommand(name, blurb.at(name));
        s->add_option("--config", fl.config, "INI file with [run], [tolerances] and parameter sections");
        s->add_option("--preset", fl.preset, "named INI file from the preset directory");
        eps_opts.push_back(s->add_option("--eps", fl.eps, "comma-separated amplitudes"));
        s->add_option("--grid", fl.grid, "transverse grid intervals");
        s->add_option("--out", fl.out, "output directory for CSV/JSON/SVG artifacts");
        s->add_option("--format", fl.formats, "csv, json or svg; repeatable")->check(CLI::IsMember({"csv", "json", "svg"}));
        if (name == "waterwave" || name == "conjugate") {
            s->add_option("--rho", fl.rho, "density ratio, p/q accepted");
            s->add_option("--omega", fl.omega, "vorticity, p/q accepted");
            s->add_option("--h0", fl.h0, "base depth");
            s->add_option("--c0", fl.c0, "base speed");
        }
        if (name == "fkpp" || name == "spectrum") s->add_option("--beta", fl.beta, "Robin coefficient");
        if (name == "fkpp") s->add_option("--lambda1", fl.lambda1, "advection coefficient");
        if (name == "verify") s->add_option("--inject-dyn-fault", fl.fault, "perturb the dynamic polynomial by P h+^4");
        subs[name] = s;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return config_error;
    }
    for (auto* o : eps_opts) fl.eps_given = fl.eps_given || o->count() > 0;
    std::string name;
    for (const auto& [n, s] : subs)
        if (s->parsed()) name = n;

    try {
        auto cfg = build_config(name, fl);
        Output out(fl.out, cfg);
        bool failed = false;
        Json results;
        if (name == "spectrum") results = run_spectrum(cfg, out);
        else if (name == "elasticity") results = run_elasticity(cfg, out);
        else if (name == "fkpp") results = run_fkpp(cfg, out);
        else if (name == "waterwave") results = run_waterwave(cfg, out);
        else if (name == "conjugate") results = run_conjugate(cfg, out);
        else results = run_verify(cfg, out, failed);
        Json report{{"application", name}, {"config", cfg.to_json()}, {"config_hash", cfg.hash()},
                    {"tolerances", tolerances(cfg)}, {"results", results}};
        std::string text = to_json_text(report);
        out.emit("report.json", "json", text);
        std::cout << text;
        return failed ? acceptance_failure : ok;
    } catch (const Error& e) {
        const char* kind = e.kind() == ErrorKind::config ? "config" : e.kind() == ErrorKind::numerical ? "numerical" : "precondition";
        std::cerr << to_json_text(Json{{"error", kind}, {"application", name}, {"message", e.what()}});
        return e.kind() == ErrorKind::config ? config_error : numerical_error;
    } catch (const std::exception& e) {
        std::cerr << to_json_text(Json{{"error", "internal"}, {"application", name}, {"message", e.what()}});
        return numerical_error;
    }
}
