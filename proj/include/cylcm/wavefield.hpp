#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "cylcm/conjugate.hpp"
#include "cylcm/reduced.hpp"

namespace cylcm {

/// Value and derivatives of one layer's stream function at a point.
struct LayerValue {
    double psi = 0.0, x = 0.0, Y = 0.0, xx = 0.0, YY = 0.0, xY = 0.0;
};

/// Leading-order bore: psi_i = psi_i^- + c u_i with u_i = eta(x) phi0(y_i(x, Y)),
/// phi0 = 1 + y below the interface and 1 - y above.
class WaveField {
public:
    double eps = 0.0;
    double h = 0.0, hp = 0.0, c = 0.0, rho = 1.0, omega = 0.0;
    double m1 = 0.0, m2 = 0.0, Q = 0.0, c1p = 0.0, c2p = 0.0;
    double a1 = 0.0;       // scaled downstream rest point
    double amp = 0.0;      // eta = amp * V, with amp * a1 = hp - h
    double window = 40.0;  // in X = |eps| x
    Orbit orbit;
    const ReducedODE* ode = nullptr;

    double X_of(double x) const { return std::abs(eps) * x; }
    double x_of(double X) const { return X / std::abs(eps); }
    double x_window() const { return eps == 0.0 ? INFINITY : window / std::abs(eps); }

    /// (V, W, g) at scaled position X, quintic Hermite between orbit samples.
    std::array<double, 3> scaled_state(double X) const {
        if (orbit.X.empty()) return {0.0, 0.0, 0.0};
        const auto& xs = orbit.X;
        if (X <= xs.front()) return node(0);
        if (X >= xs.back()) return node(xs.size() - 1);
        std::size_t i = std::upper_bound(xs.begin(), xs.end(), X) - xs.begin() - 1;
        double hh = xs[i + 1] - xs[i], t = (X - xs[i]) / hh;
        auto a = node(i), b = node(i + 1);
        auto da = dnode(i), db = dnode(i + 1);
        double V = hermite5(a[0], a[1], a[2], b[0], b[1], b[2], hh, t);
        double W = hermite5(a[1], a[2], da, b[1], b[2], db, hh, t);
        // Near a rest point g carries the rounding of V, which can exceed |W|; the tails are
        // exponential, so fall back to geometric interpolation rather than flip the sign.
        if (a[1] * b[1] > 0 && W * a[1] <= 0) W = a[1] * std::pow(b[1] / a[1], t);
        return {V, W, ode->g(V, W, eps)};
    }

    /// eta, eta_x, eta_xx.
    std::array<double, 3> eta3(double x) const {
        if (eps == 0.0) return {0.0, 0.0, 0.0};
        double X = X_of(x);
        if (X < -window) return {0.0, 0.0, 0.0};
        if (X > window) return {hp - h, 0.0, 0.0};
        auto s = scaled_state(X);
        double ae = std::abs(eps);
        return {amp * s[0], amp * ae * s[1], amp * ae * ae * s[2]};
    }
    double eta(double x) const { return eta3(x)[0]; }
    double interface(double x) const { return h + eta(x); }

    LayerValue psi1(double x, double Y) const {
        if (downstream(x)) return {-c1p * (Y - hp), 0.0, -c1p, 0.0, 0.0, 0.0};
        auto [e, ex, exx] = eta3(x);
        double H = h + e;
        double k = e / H, k1 = h * ex / (H * H), k2 = h * exx / (H * H) - 2 * h * ex * ex / (H * H * H);
        LayerValue v;
        v.psi = -c * (Y - h) + c * Y * k;
        v.Y = -c + c * k;
        v.x = c * Y * k1;
        v.xx = c * Y * k2;
        v.xY = c * k1;
        return v;
    }

    LayerValue psi2(double x, double Y) const {
        if (downstream(x)) {
            double s = Y - hp;
            return {-c2p * s - 0.5 * omega * s * s, 0.0, -c2p - omega * s, 0.0, -omega, 0.0};
        }
        auto [e, ex, exx] = eta3(x);
        double L = 1 - h - e;
        double m = e / L, m1d = (1 - h) * ex / (L * L),
               m2d = (1 - h) * exx / (L * L) + 2 * (1 - h) * ex * ex / (L * L * L);
        double s = Y - h;
        LayerValue v;
        v.psi = -c * s - 0.5 * omega * s * s + c * (1 - Y) * m;
        v.Y = -c - omega * s - c * m;
        v.YY = -omega;
        v.x = c * (1 - Y) * m1d;
        v.xx = c * (1 - Y) * m2d;
        v.xY = -c * m1d;
        return v;
    }

    /// Stream function of whichever layer contains (x, Y); the interface belongs to the lower one.
    LayerValue psi(double x, double Y) const { return Y <= interface(x) ? psi1(x, Y) : psi2(x, Y); }

private:
    bool downstream(double x) const { return eps != 0.0 && X_of(x) > window; }

    std::array<double, 3> node(std::size_t i) const {
        const auto& y = orbit.Y[i];
        return {y[0], y[1], ode->g(y[0], y[1], eps)};
    }
    double dnode(std::size_t i) const {
        const auto& y = orbit.Y[i];
        auto d = ode->dg(y[0], y[1], eps);
        return d[0] * y[1] + d[1] * ode->g(y[0], y[1], eps);
    }
    static double hermite5(double y0, double d0, double s0, double y1, double d1, double s1, double hh, double t) {
        double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        double H0 = 1 - 10 * t3 + 15 * t4 - 6 * t5, H1 = t - 6 * t3 + 8 * t4 - 3 * t5,
               H2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5, H3 = 10 * t3 - 15 * t4 + 6 * t5,
               H4 = -4 * t3 + 7 * t4 - 3 * t5, H5 = 0.5 * t3 - t4 + 0.5 * t5;
        return H0 * y0 + hh * H1 * d0 + hh * hh * H2 * s0 + H3 * y1 + hh * H4 * d1 + hh * hh * H5 * s1;
    }
};

/// Bore at amplitude eps on the water-wave branch through (h0, c0).
inline WaveField reconstruct(const ConjugateSystem& sys, const WaterReduction& red, double eps,
                             const ConnectOptions& opt = {}) {
    WaveField f;
    f.eps = eps;
    f.rho = sys.rho_d();
    f.omega = sys.omega_d();
    f.ode = &red.ode;
    f.window = opt.window;
    const auto& b = red.branch;
    f.h = b.h0 + eps;
    if (eps == 0.0) {
        f.hp = f.h;
        f.c = b.c0;
    } else {
        auto s = solve_conjugate(sys, f.h, b.hp_series(eps), b.c_series(eps));
        f.hp = s.hp;
        f.c = s.c;
    }
    if (!(f.h > 0 && f.h < 1 && f.hp > 0 && f.hp < 1)) fail_pre("interface exits channel");
    FlowState<double> st{f.h, f.hp, f.c, f.rho, f.omega};
    f.m1 = st.m1();
    f.m2 = st.m2();
    f.Q = st.bernoulli_up();
    f.c1p = st.c1p();
    f.c2p = st.c2p();
    if (eps == 0.0) return f;
    auto eq = equilibria(red.ode, eps).points;
    if (eq.size() != 3) fail_num("bore rest points not found");
    const Equilibrium* zero = nullptr;
    const Equilibrium* far = nullptr;
    for (const auto& e : eq) {
        if (e.V == 0.0) zero = &e;
        else if (e.kind == EqKind::saddle) far = &e;
    }
    if (!zero || !far) fail_num("bore rest points not found");
    f.a1 = far->V;
    f.amp = (f.hp - f.h) / f.a1;
    f.orbit = connect(red.ode, eps, *zero, *far, opt).orbit;
    return f;
}

// ------------------------------------------------------------ critical layer

struct CriticalLayer {
    std::vector<double> x, Y;
    double upstream = 0.0;  // Y_c at x -> -infinity
    bool sign_pattern = true;
};

/// Height of psi2_Y = 0 at fixed x by Newton from the upstream height.
inline double critical_height(const WaveField& f, double x) {
    double Y = f.h - f.c / f.omega;
    for (int it = 0; it < 20; ++it) {
        auto v = f.psi2(x, Y);
        double dY = v.Y / v.YY;
        Y -= dY;
        if (std::abs(dY) <= 1e-15) break;
    }
    return Y;
}

inline CriticalLayer critical_layer(const WaveField& f, int samples = 401) {
    if (f.omega == 0.0) fail_pre("no critical layer");
    double yc = f.h - f.c / f.omega;
    if (!(yc > f.h && yc < 1)) fail_pre("no critical layer");
    CriticalLayer cl;
    cl.upstream = yc;
    double xw = std::isfinite(f.x_window()) ? f.x_window() : 1.0;
    double up_sign = -f.omega > 0 ? 1.0 : -1.0;  // sign of psi2_Y above the layer
    for (int i = 0; i < samples; ++i) {
        double x = -xw + 2 * xw * i / (samples - 1);
        double Y = critical_height(f, x);
        if (!(Y > f.interface(x) && Y < 1)) fail_num("critical layer left the upper fluid");
        cl.x.push_back(x);
        cl.Y.push_back(Y);
        for (double d : {1e-3, 1e-2}) {
            if (Y + d < 1) cl.sign_pattern = cl.sign_pattern && f.psi2(x, Y + d).Y * up_sign > 0;
            if (Y - d > f.interface(x)) cl.sign_pattern = cl.sign_pattern && f.psi2(x, Y - d).Y * up_sign < 0;
        }
    }
    return cl;
}

// --------------------------------------------------------------------- eye

struct EyeRegion {
    double level = 0.0;  // c^2 / (2 omega)
    double lower = 0.0, upper = 0.0;
    double half_width() const { return 0.5 * (upper - lower); }
};

/// Downstream heights where psi2 equals the upstream critical value.
inline EyeRegion eye_bounds(const WaveField& f) {
    if (f.omega == 0.0) fail_pre("no critical layer");
    EyeRegion e;
    e.level = f.c * f.c / (2 * f.omega);
    auto down = [&](double Y) {
        double s = Y - f.hp;
        return -f.c2p * s - 0.5 * f.omega * s * s - e.level;
    };
    double yc = f.hp - f.c2p / f.omega;
    if (f.eps == 0.0) {
        e.lower = e.upper = yc;
        return e;
    }
    double mid = down(yc);
    if (!(yc > f.hp && yc < 1) || mid == 0.0 || (mid > 0) == (f.omega < 0)) fail_pre("eye absent");
    boost::uintmax_t it = 100;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    auto lo = boost::math::tools::toms748_solve(down, f.hp, yc, down(f.hp), mid, tol, it);
    it = 100;
    auto hi = boost::math::tools::toms748_solve(down, yc, 1.0, mid, down(1.0), tol, it);
    e.lower = 0.5 * (lo.first + lo.second);
    e.upper = 0.5 * (hi.first + hi.second);
    return e;
}

/// Leading-order eye half-width, |1/omega| sqrt(2 c0 (c0 + omega (1-h0)) a1 eps / (1-h0)).
inline double eye_half_width_asymptotic(double h0, double c0, double omega, double a1, double eps) {
    double r = 2 * c0 * (c0 + omega * (1 - h0)) * a1 * eps / (1 - h0);
    if (!(r > 0)) fail_pre("eye absent");
    return std::sqrt(r) / std::abs(omega);
}

// -------------------------------------------------------------- streamlines

struct StreamlineOptions {
    double h0 = 1e-3;    // initial step, channel heights
    double hmax = 0.5;   // in scaled X
    double tol = 1e-13;  // level-set defect
    std::size_t max_steps = 200000;
};

struct Streamline {
    std::vector<double> x, Y;
    std::string label;  // eye | through | truncated
    double level = 0.0;
    bool has_turn = false;
    double turn_x = 0.0, turn_Y = 0.0, turn_offset = 0.0;  // offset from the critical layer
};

namespace detail {

enum class Exit { upstream, downstream, wall, stuck };

struct Trace {
    std::vector<std::array<double, 2>> p;  // (X, Y)
    Exit exit = Exit::stuck;
};

inline Trace trace_level(const WaveField& f, double X0, double Y0, double level, double dir, bool lower,
                         const StreamlineOptions& opt) {
    double ae = std::abs(f.eps);
    auto eval = [&](double X, double Y) {
        auto v = lower ? f.psi1(f.x_of(X), Y) : f.psi2(f.x_of(X), Y);
        return std::array<double, 3>{v.psi - level, v.x / ae, v.Y};
    };
    auto tangent = [&](const std::array<double, 3>& v, const std::array<double, 2>& prev) {
        double n = std::hypot(v[1], v[2]);
        std::array<double, 2> t{v[2] / n, -v[1] / n};
        if (t[0] * prev[0] + t[1] * prev[1] < 0) t = {-t[0], -t[1]};
        return t;
    };
    Trace tr;
    std::array<double, 2> p{X0, Y0};
    auto v0 = eval(X0, Y0);
    std::array<double, 2> t = tangent(v0, {dir, 0.0});
    tr.p.push_back(p);
    double hstep = opt.h0;
    for (std::size_t step = 0; step < opt.max_steps; ++step) {
        std::array<double, 2> q{p[0] + hstep * t[0], p[1] + hstep * t[1]};
        bool ok = false;
        std::array<double, 3> v{};
        for (int k = 0; k < 12; ++k) {
            v = eval(q[0], q[1]);
            double g2 = v[1] * v[1] + v[2] * v[2];
            if (g2 == 0.0) break;
            if (std::abs(v[0]) <= opt.tol) {
                ok = true;
                break;
            }
            q[0] -= v[0] * v[1] / g2;
            q[1] -= v[0] * v[2] / g2;
        }
        double drift = std::hypot(q[0] - p[0] - hstep * t[0], q[1] - p[1] - hstep * t[1]);
        std::array<double, 2> tn{};
        double turn = 0.0;
        if (ok) {
            tn = tangent(v, t);
            turn = std::abs(t[0] * tn[1] - t[1] * tn[0]);
        }
        if (!ok || drift > 0.05 * hstep || turn > 0.05) {
            hstep *= 0.5;
            if (hstep < 1e-12) return tr;
            continue;
        }
        p = q;
        t = tn;
        tr.p.push_back(p);
        if (p[0] > f.window) {
            tr.exit = Exit::downstream;
            return tr;
        }
        if (p[0] < -f.window) {
            tr.exit = Exit::upstream;
            return tr;
        }
        if (p[1] <= 0.0 || p[1] >= 1.0) {
            tr.exit = Exit::wall;
            return tr;
        }
        if (turn < 0.01 && drift < 0.005 * hstep) hstep = std::min(1.5 * hstep, opt.hmax);
    }
    return tr;
}

}  // namespace detail

/// Level-set trace of psi through a seed, classified against the critical layer.
inline Streamline streamline(const WaveField& f, double x, double Y, const StreamlineOptions& opt = {}) {
    if (f.eps == 0.0) fail_pre("streamlines need a nontrivial bore");
    if (!(Y > 0 && Y < 1)) fail_pre("seed must lie strictly inside the fluid");
    bool lower = Y <= f.interface(x);
    double level = (lower ? f.psi1(x, Y) : f.psi2(x, Y)).psi;
    double X = f.X_of(x);
    auto fwd = detail::trace_level(f, X, Y, level, 1.0, lower, opt);
    auto bwd = detail::trace_level(f, X, Y, level, -1.0, lower, opt);
    Streamline s;
    s.level = level;
    for (std::size_t i = bwd.p.size(); i-- > 1;) {
        s.x.push_back(f.x_of(bwd.p[i][0]));
        s.Y.push_back(bwd.p[i][1]);
    }
    for (const auto& p : fwd.p) {
        s.x.push_back(f.x_of(p[0]));
        s.Y.push_back(p[1]);
    }
    // Turning point: sign change of dx along the polyline, refined by a parabola x(Y).
    for (std::size_t i = 1; i + 1 < s.x.size(); ++i) {
        double d0 = s.x[i] - s.x[i - 1], d1 = s.x[i + 1] - s.x[i];
        if (d0 * d1 >= 0) continue;
        double y0 = s.Y[i - 1], y1 = s.Y[i], y2 = s.Y[i + 1];
        double x0 = s.x[i - 1], x1 = s.x[i], x2 = s.x[i + 1];
        double a = ((x2 - x1) / (y2 - y1) - (x1 - x0) / (y1 - y0)) / (y2 - y0);
        double b = (x1 - x0) / (y1 - y0) - a * (y0 + y1);
        double yt = -b / (2 * a);
        double xt = a * yt * yt + b * yt + (x0 - a * y0 * y0 - b * y0);
        s.has_turn = true;
        s.turn_x = xt;
        s.turn_Y = yt;
        s.turn_offset = std::abs(yt - critical_height(f, xt));
        break;
    }
    using detail::Exit;
    bool through = (fwd.exit == Exit::downstream && bwd.exit == Exit::upstream) ||
                   (fwd.exit == Exit::upstream && bwd.exit == Exit::downstream);
    bool eye = fwd.exit == Exit::downstream && bwd.exit == Exit::downstream && s.has_turn;
    s.label = through ? "through" : eye ? "eye" : "truncated";
    return s;
}

// ------------------------------------------------------------ monotonicity

struct MonotonicityReport {
    double eta_x_min = 0.0, eta_x_max = 0.0;
    double psi_x_min = 0.0, psi_x_max = 0.0;
    std::string verdict;  // decreasing | increasing | trivial | mixed
};

inline MonotonicityReport monotonicity_check(const WaveField& f, int nx = 801, int ny = 41) {
    MonotonicityReport r;
    if (f.eps == 0.0) {
        r.verdict = "trivial";
        return r;
    }
    r.eta_x_min = r.psi_x_min = INFINITY;
    r.eta_x_max = r.psi_x_max = -INFINITY;
    double xw = f.x_window();
    for (int i = 0; i < nx; ++i) {
        double x = -xw + 2 * xw * i / (nx - 1);
        double ex = f.eta3(x)[1];
        r.eta_x_min = std::min(r.eta_x_min, ex);
        r.eta_x_max = std::max(r.eta_x_max, ex);
        for (int j = 1; j < ny; ++j) {
            double Y = static_cast<double>(j) / ny;
            if (std::abs(Y - f.interface(x)) < 1e-12) continue;
            double px = f.psi(x, Y).x;
            r.psi_x_min = std::min(r.psi_x_min, px);
            r.psi_x_max = std::max(r.psi_x_max, px);
        }
    }
    if (r.eta_x_max < 0 && r.psi_x_max < 0) r.verdict = "decreasing";
    else if (r.eta_x_min > 0 && r.psi_x_min > 0) r.verdict = "increasing";
    else r.verdict = "mixed";
    return r;
}

// --------------------------------------------------------------- residuals

struct FieldResiduals {
    double laplace1 = 0.0, laplace2 = 0.0;
    double kinematic_interface = 0.0;
    double kinematic_walls = 0.0;
    double dynamic = 0.0;
};

inline FieldResiduals residual(const WaveField& f, int nx = 2001, int ny = 21) {
    FieldResiduals r;
    double xw = std::isfinite(f.x_window()) ? f.x_window() : 1.0;
    for (int i = 0; i < nx; ++i) {
        double x = -xw + 2 * xw * i / (nx - 1);
        double H = f.interface(x);
        auto p1 = f.psi1(x, H), p2 = f.psi2(x, H);
        r.kinematic_interface = std::max({r.kinematic_interface, std::abs(p1.psi), std::abs(p2.psi)});
        r.kinematic_walls = std::max({r.kinematic_walls, std::abs(f.psi2(x, 1.0).psi + f.m2),
                                      std::abs(f.psi1(x, 0.0).psi - f.m1)});
        double g1 = p1.x * p1.x + p1.Y * p1.Y, g2 = p2.x * p2.x + p2.Y * p2.Y;
        r.dynamic = std::max(r.dynamic, std::abs(0.5 * f.rho * g2 - 0.5 * g1 + (f.rho - 1) * (H - f.h) - f.Q));
        for (int j = 0; j <= ny; ++j) {
            double s = static_cast<double>(j) / ny;
            auto v1 = f.psi1(x, s * H);
            auto v2 = f.psi2(x, H + s * (1 - H));
            r.laplace1 = std::max(r.laplace1, std::abs(v1.xx + v1.YY));
            r.laplace2 = std::max(r.laplace2, std::abs(v2.xx + v2.YY + f.omega));
        }
    }
    return r;
}

/// Flow force on the vertical slice at x, by Gauss-Legendre in each layer.
inline double flow_force_slice(const WaveField& f, double x) {
    using boost::math::quadrature::gauss;
    double H = f.interface(x), K = 0.5 * f.c * f.c + f.h;
    auto low = [&](double Y) {
        auto v = f.psi1(x, Y);
        return 0.5 * (v.x * v.x + v.Y * v.Y) - Y + K;
    };
    auto up = [&](double Y) {
        auto v = f.psi2(x, Y);
        return 0.5 * (v.x * v.x + v.Y * v.Y) - Y - f.omega * v.psi + K;
    };
    return gauss<double, 10>::integrate(low, 0.0, H) + f.rho * gauss<double, 10>::integrate(up, H, 1.0);
}

/// max_x |S(x) - S(-inf)| over the window.
inline double flow_force_drift(const WaveField& f, int nx = 801) {
    FlowState<double> st{f.h, f.hp, f.c, f.rho, f.omega};
    double s0 = flow_force(st, Side::upstream), d = 0.0;
    double xw = f.x_window();
    for (int i = 0; i < nx; ++i) {
        double x = -xw + 2 * xw * i / (nx - 1);
        d = std::max(d, std::abs(flow_force_slice(f, x) - s0));
    }
    return d;
}

}  // namespace cylcm
