#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cylcm/applications.hpp"
#include "cylcm/conjugate.hpp"
#include "cylcm/hierarchy.hpp"
#include "cylcm/ode.hpp"

namespace cylcm {

enum class AppKind { elasticity, fkpp, waterwave };

inline std::string to_string(AppKind a) {
    switch (a) {
        case AppKind::elasticity: return "elasticity";
        case AppKind::fkpp: return "fkpp";
        case AppKind::waterwave: return "waterwave";
    }
    return "?";
}

/// Planar reduced equation A'' = f(A, A', eps) with f = sum f_ijk A^i B^j eps^k.
///
/// Scaled variables A = eps^q V, x = X / |eps|^n turn it into
/// V'' = g(V, V'; eps) with O(1) coefficients when the plan is balanced.
struct ReducedODE {
    AppKind app = AppKind::elasticity;
    std::map<Index, double> f;
    ScalingPlan plan;
    bool reversible = true;
    int expected_equilibria = 0;
    std::optional<double> s020;

    double coeff(const Index& ix) const {
        auto it = f.find(ix);
        return it == f.end() ? 0.0 : it->second;
    }

    double eval(double A, double B, double eps) const {
        double s = 0.0;
        for (const auto& [ix, v] : f) s += v * std::pow(A, ix[0]) * std::pow(B, ix[1]) * std::pow(eps, ix[2]);
        return s;
    }

    /// Coefficient of V^i W^j in the scaled equation.
    double scaled(const Index& ix, double eps) const {
        const auto& [i, j, k] = ix;
        int e_signed = plan.q * i + plan.q * j + k - plan.q;
        int e_total = e_signed + plan.n * j - 2 * plan.n;
        double v = coeff(ix);
        if (v == 0.0) return 0.0;
        if (eps == 0.0) {
            if (e_total > 0) return 0.0;
            if (e_total == 0) return v;
            fail_pre("scaling plan is not balanced for term " + index_key(ix));
        }
        double sgn = (eps < 0 && e_signed % 2 != 0) ? -1.0 : 1.0;
        return v * sgn * std::pow(std::abs(eps), e_total);
    }

    double g(double V, double W, double eps) const {
        double s = 0.0;
        for (const auto& [ix, v] : f) {
            (void)v;
            s += scaled(ix, eps) * std::pow(V, ix[0]) * std::pow(W, ix[1]);
        }
        return s;
    }

    /// (dg/dV, dg/dW).
    std::array<double, 2> dg(double V, double W, double eps) const {
        std::array<double, 2> d{0.0, 0.0};
        for (const auto& [ix, v] : f) {
            (void)v;
            double s = scaled(ix, eps);
            if (ix[0] > 0) d[0] += s * ix[0] * std::pow(V, ix[0] - 1) * std::pow(W, ix[1]);
            if (ix[1] > 0) d[1] += s * ix[1] * std::pow(V, ix[0]) * std::pow(W, ix[1] - 1);
        }
        return d;
    }

    Rhs<2> rhs(double eps) const {
        return [this, eps](double, const State<2>& y) { return State<2>{y[1], g(y[0], y[1], eps)}; };
    }

    /// Coefficients c_i of V^i in g(V, 0; eps).
    std::vector<double> restpoly(double eps) const {
        std::vector<double> c;
        for (const auto& [ix, v] : f) {
            (void)v;
            if (ix[1] != 0) continue;
            if (static_cast<int>(c.size()) <= ix[0]) c.resize(ix[0] + 1, 0.0);
            c[ix[0]] += scaled(ix, eps);
        }
        return c;
    }

    bool hamiltonian() const {
        for (const auto& [ix, v] : f)
            if (ix[1] != 0 && v != 0.0) return false;
        return true;
    }
};

// ---------------------------------------------------------------- assembly

inline ReducedODE from_table(AppKind app, const PsiTable& t, ScalingPlan plan) {
    ReducedODE ode;
    ode.app = app;
    ode.plan = plan;
    for (const auto& ix : t.J) ode.f[ix] = t.coefficient(ix);
    return ode;
}

inline ReducedODE assemble_elasticity(const ElasticityParams& p, const HierarchyOptions& opt = {}) {
    auto ode = from_table(AppKind::elasticity, expand_reduction(elasticity_spec(p), opt), elasticity_scaling());
    ode.reversible = true;
    ode.expected_equilibria = 3;
    return ode;
}

struct FkppReduction {
    ReducedODE ode;
    double rho0 = 0.0;
    double nu1 = 0.0;
    double sigma = 0.0;
};

inline FkppReduction assemble_fkpp(const FkppParams& p, const HierarchyOptions& opt = {}) {
    auto crit = fkpp_critical(p.beta, p.grid);
    auto ode = from_table(AppKind::fkpp, expand_reduction(fkpp_spec(p, crit.p), opt), fkpp_scaling());
    ode.reversible = false;
    ode.expected_equilibria = 2;
    return {ode, crit.p, crit.nu1, ode.coeff({2, 0, 0})};
}

/// Closed-form water-wave coefficients at a base point (h0, c0).
///
/// f102 is obtained from the long-wave dispersion function
/// D(h, c) = rho c omega + rho c^2/(1-h) + c^2/h + rho - 1 expanded to second
/// order along the conjugate branch; the first-order term vanishes there.
template <class T>
struct WaterCoefficients {
    T f300, f201, f102, s020;
    T a1, lambda1_sq;
    T hp1, c1, c2;
    T tangency;  // first-order dispersion term along the branch, zero in exact arithmetic
    T a1_display;  // -2 f201 / f300, off by a factor 3 from a1
};

template <class T>
WaterCoefficients<T> waterwave_coefficients(const T& h0, const T& c0, const T& rho, const T& omega,
                                            const SeriesCoefficients<T>& s) {
    T g = rho + (1 - rho) * h0;
    if (c0 == T(0) || h0 == T(0) || h0 == T(1) || g == T(0)) fail_pre("degenerate parameters");
    T num = (1 - rho) * h0 * h0 * h0 + c0 * c0 * (4 - 5 * h0);
    T den = c0 * c0 * h0 * h0 * h0 * (1 - h0) * (1 - h0) * g;
    WaterCoefficients<T> w;
    w.f300 = T(3) * num / (T(2) * den);
    if (w.f300 == T(0)) fail_pre("degenerate parameters: f300 = 0");
    w.hp1 = s.hp1;
    w.c1 = s.c1;
    w.c2 = s.c2;
    w.a1 = s.hp1 - 1;
    w.f201 = -T(3) * w.f300 * w.a1 / 2;
    T l = 1 - h0;
    T Dc = rho * omega + 2 * rho * c0 / l + 2 * c0 / h0;
    T Dh = rho * c0 * c0 / (l * l) - c0 * c0 / (h0 * h0);
    T Dcc = 2 * rho / l + T(2) / h0;
    T Dhh = 2 * rho * c0 * c0 / (l * l * l) + 2 * c0 * c0 / (h0 * h0 * h0);
    T Dhc = 2 * rho * c0 / (l * l) - 2 * c0 / (h0 * h0);
    w.tangency = Dh + Dc * s.c1;
    T second = Dhh / 2 + Dhc * s.c1 + Dcc * s.c1 * s.c1 / 2 + Dc * s.c2;
    w.f102 = T(3) * second / (c0 * c0 * g);
    w.s020 = -c0 * c0 * g / 6;
    w.lambda1_sq = w.f201 * w.f201 / (18 * w.f300);
    w.a1_display = -2 * w.f201 / w.f300;
    return w;
}

inline ReducedODE waterwave_ode(const WaterCoefficients<double>& w) {
    ReducedODE ode;
    ode.app = AppKind::waterwave;
    ode.plan = {1, 1, 1, 3};
    ode.f = {{{1, 0, 2}, w.f102}, {{2, 0, 1}, w.f201}, {{3, 0, 0}, w.f300}};
    ode.reversible = true;
    ode.expected_equilibria = 3;
    ode.s020 = w.s020;
    return ode;
}

struct WaterReduction {
    ReducedODE ode;
    WaterCoefficients<double> coeffs;
    ConjugateBranch branch;
    std::optional<WaterCoefficients<Rational>> exact;
};

inline WaterCoefficients<double> to_double(const WaterCoefficients<Rational>& e) {
    auto d = [](const Rational& v) { return static_cast<double>(v); };
    return {d(e.f300), d(e.f201), d(e.f102), d(e.s020), d(e.a1), d(e.lambda1_sq),
            d(e.hp1), d(e.c1), d(e.c2), d(e.tangency), d(e.a1_display)};
}

inline WaterReduction assemble_waterwave(const ConjugateSystem& sys, double h0, double c0, double eps_max = 0.0) {
    auto b = branch_expand(sys, h0, c0, eps_max);
    SeriesCoefficients<double> s{b.hp1, b.hp2, b.c1, b.c2, b.det_h_hp, b.det_sum_c, b.det_hp_c};
    auto w = waterwave_coefficients<double>(h0, c0, sys.rho_d(), sys.omega_d(), s);
    return {waterwave_ode(w), w, b, std::nullopt};
}

inline WaterReduction assemble_waterwave(const ConjugateSystem& sys, const Rational& h0, const Rational& c0,
                                         double eps_max = 0.0) {
    auto b = branch_expand(sys, h0, c0, eps_max);
    auto e = waterwave_coefficients<Rational>(h0, c0, sys.rho(), sys.omega(), *b.exact);
    auto w = to_double(e);
    return {waterwave_ode(w), w, b, e};
}

// -------------------------------------------------------------- equilibria

enum class EqKind { saddle, center, sink, source };

inline std::string to_string(EqKind k) {
    switch (k) {
        case EqKind::saddle: return "saddle";
        case EqKind::center: return "center";
        case EqKind::sink: return "sink";
        case EqKind::source: return "source";
    }
    return "?";
}

struct Equilibrium {
    double V = 0.0;  // scaled
    double A = 0.0;  // unscaled amplitude eps^q V
    EqKind kind = EqKind::center;
    std::array<std::complex<double>, 2> eig{};
    double residual = 0.0;
};

inline Equilibrium classify(const ReducedODE& ode, double eps, double V) {
    auto d = ode.dg(V, 0.0, eps);
    double tr = d[1], disc = tr * tr + 4 * d[0];
    Equilibrium e;
    e.V = V;
    e.A = std::pow(eps, ode.plan.q) * V;
    e.residual = std::abs(ode.g(V, 0.0, eps));
    std::complex<double> r = std::sqrt(std::complex<double>(disc, 0.0));
    e.eig = {(tr + r) / 2.0, (tr - r) / 2.0};
    double scale = std::max({1.0, std::abs(tr), std::abs(d[0])});
    if (d[0] > 0) e.kind = EqKind::saddle;
    else if (std::abs(tr) <= 1e-13 * scale) e.kind = EqKind::center;
    else e.kind = tr < 0 ? EqKind::sink : EqKind::source;
    return e;
}

struct EquilibriumReport {
    std::vector<Equilibrium> points;
    std::string warning;
};

/// Real rest points of the scaled system with |V| <= trust, sorted by V.
inline EquilibriumReport equilibria(const ReducedODE& ode, double eps, double trust = 1e3) {
    auto c = ode.restpoly(eps);
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    EquilibriumReport rep;
    if (!c.empty() && c[0] != 0.0) fail_pre("trivial state is not a rest point");
    if (c.size() > 4) fail_pre("rest-point polynomial of degree above 3 is not supported");
    std::vector<double> roots{0.0};
    // g(V, 0)/V = c1 + c2 V + c3 V^2
    double a = c.size() > 3 ? c[3] : 0.0, b = c.size() > 2 ? c[2] : 0.0, k = c.size() > 1 ? c[1] : 0.0;
    if (a != 0.0) {
        double disc = b * b - 4 * a * k;
        if (disc >= 0) {
            double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
            if (q != 0.0) {
                roots.push_back(q / a);
                roots.push_back(k / q);
            } else {
                roots.push_back(0.0);
            }
        }
    } else if (b != 0.0) {
        roots.push_back(-k / b);
    }
    auto poly = [&](double V) {
        double s = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) s = s * V + c[i];
        return s;
    };
    auto dpoly = [&](double V) {
        double s = 0.0;
        for (std::size_t i = c.size(); i-- > 1;) s = s * V + i * c[i];
        return s;
    };
    std::sort(roots.begin(), roots.end());
    for (double r : roots) {
        if (!std::isfinite(r) || std::abs(r) > trust) continue;
        for (int it = 0; it < 4 && r != 0.0; ++it) {
            double d = dpoly(r);
            if (d == 0.0) break;
            r -= poly(r) / d;
        }
        if (!rep.points.empty() && std::abs(rep.points.back().V - r) <= 1e-12 * std::max(1.0, std::abs(r))) continue;
        rep.points.push_back(classify(ode, eps, r));
    }
    if (ode.expected_equilibria > 0 && static_cast<int>(rep.points.size()) != ode.expected_equilibria)
        rep.warning = "found " + std::to_string(rep.points.size()) + " rest points, expected " +
                      std::to_string(ode.expected_equilibria);
    return rep;
}

// ------------------------------------------------------------------- orbits

struct PhaseState {
    double V = 0.0, W = 0.0, X = 0.0;
};

struct Orbit {
    double eps = 0.0;
    std::vector<double> X;
    std::vector<State<2>> Y;
    double max_local_error = 0.0;
    bool escaped = false;
};

inline Orbit integrate(const ReducedODE& ode, double eps, const PhaseState& start, double X_end,
                       const StepControl& ctl = {}, const std::vector<double>& samples = {}) {
    for (double v : {start.V, start.W, start.X, X_end})
        if (!std::isfinite(v)) fail_pre("non-finite integration input");
    auto tr = integrate<2>(ode.rhs(eps), start.X, State<2>{start.V, start.W}, X_end, ctl);
    Orbit o;
    o.eps = eps;
    o.max_local_error = tr.max_local_error;
    o.escaped = tr.escaped;
    if (samples.empty()) {
        o.X = tr.x;
        o.Y = tr.y;
        return o;
    }
    double lo = std::min(tr.x.front(), tr.x.back()), hi = std::max(tr.x.front(), tr.x.back());
    for (double s : samples) {
        if (s < lo || s > hi) continue;
        o.X.push_back(s);
        o.Y.push_back(tr.at(s));
    }
    return o;
}

/// Truncated conserved quantity 1/2 W^2 - sum_i c_i V^{i+1}/(i+1).
inline double conserved_scaled(const ReducedODE& ode, double eps, double V, double W) {
    if (!ode.hamiltonian()) fail_pre("conserved quantity requested for a non-Hamiltonian reduced equation");
    auto c = ode.restpoly(eps);
    double s = 0.5 * W * W;
    for (std::size_t i = 0; i < c.size(); ++i) s -= c[i] * std::pow(V, static_cast<double>(i + 1)) / (i + 1);
    return s;
}

// ------------------------------------------------------- truncated profiles

enum class ProfileKind { front, pulse, bore };

struct ProfileShape {
    ProfileKind kind = ProfileKind::front;
    double a = 0.0;      // scaled amplitude
    double kappa = 0.0;  // scaled inverse length
};

/// Closed-form solution of the truncated scaled equation.
inline ProfileShape profile_shape(const ReducedODE& ode) {
    double f102 = ode.coeff({1, 0, 2}), f300 = ode.coeff({3, 0, 0});
    switch (ode.app) {
        case AppKind::elasticity:
            if (f102 < 0 && f300 > 0) return {ProfileKind::front, std::sqrt(-f102 / f300), std::sqrt(-f102 / 2)};
            if (f102 > 0 && f300 < 0) return {ProfileKind::pulse, std::sqrt(-2 * f102 / f300), std::sqrt(f102)};
            fail_pre("no front in this regime");
        case AppKind::waterwave: {
            double f201 = ode.coeff({2, 0, 1});
            if (!(f300 > 0) || f201 == 0.0) fail_pre("no front in this regime");
            return {ProfileKind::bore, -2 * f201 / (3 * f300), std::sqrt(f201 * f201 / (18 * f300))};
        }
        case AppKind::fkpp: break;
    }
    fail_pre("no closed-form profile for this application");
}

struct ProfilePoint {
    PhaseState s;
    double Wx = 0.0;  // second derivative
};

inline ProfilePoint truncated_profile(const ProfileShape& p, double X) {
    double t = std::tanh(p.kappa * X), sc = 1.0 / std::cosh(p.kappa * X), k = p.kappa, a = p.a;
    switch (p.kind) {
        case ProfileKind::front: return {{a * t, a * k * sc * sc, X}, -2 * a * k * k * t * sc * sc};
        case ProfileKind::pulse: return {{a * sc, -a * k * sc * t, X}, a * k * k * sc * (1 - 2 * sc * sc)};
        case ProfileKind::bore: return {{a * (1 + t) / 2, a * k * sc * sc / 2, X}, -a * k * k * t * sc * sc};
    }
    return {};
}

inline ProfilePoint truncated_profile(const ReducedODE& ode, double X) { return truncated_profile(profile_shape(ode), X); }

// --------------------------------------------------------------- connect

struct ConnectOptions {
    double seed_offset = 1e-7;
    double window = 40.0;
    double sink_tol = 1e-8;
    double tail_step = 0.25;
    StepControl ctl{};
};

struct Connection {
    Orbit orbit;
    Equilibrium from, to;
    std::string kind;  // heteroclinic | homoclinic | front
    double crossing = 0.0;        // W at the symmetric crossing
    double endpoint_error = 0.0;  // distance of the final sample to `to`
    bool in_triangle = true;
    bool monotone = true;
};

namespace detail {

inline std::array<double, 2> unstable_direction(const Equilibrium& e) {
    double mu = e.eig[0].real();
    double n = std::hypot(1.0, mu);
    return {1.0 / n, mu / n};
}

}  // namespace detail

inline Connection connect(const ReducedODE& ode, double eps, const Equilibrium& from, const Equilibrium& to,
                          const ConnectOptions& opt = {}) {
    if (from.kind != EqKind::saddle) fail_pre("connection must start at a saddle");
    Connection c;
    c.from = from;
    c.to = to;
    auto rhs = ode.rhs(eps);
    auto u = detail::unstable_direction(from);
    double mu = from.eig[0].real();
    double sgn = to.V != from.V ? (to.V > from.V ? 1.0 : -1.0) : 1.0;
    State<2> seed{from.V + sgn * opt.seed_offset * u[0], sgn * opt.seed_offset * u[1]};

    if (!ode.reversible) {
        if (to.kind != EqKind::sink) fail_pre("non-reversible connection must end at a sink");
        c.kind = "front";
        auto stop = [&](double, const State<2>& y) { return std::hypot(y[0] - to.V, y[1]) <= opt.sink_tol; };
        auto tr = integrate<2>(rhs, 0.0, seed, 50 * opt.window, opt.ctl, nullptr, stop);
        if (!tr.stopped) fail_num("connection not found: orbit did not reach the sink");
        // Phase: V crosses the midpoint at X = 0.
        double mid = 0.5 * (from.V + to.V), x0 = 0.0;
        for (std::size_t i = 1; i < tr.x.size(); ++i)
            if ((tr.y[i - 1][0] - mid) * (tr.y[i][0] - mid) <= 0) {
                double a = tr.x[i - 1], b = tr.x[i];
                while (b - a > 1e-12) {
                    double m = 0.5 * (a + b);
                    if ((tr.at(m)[0] - mid) * (tr.y[i - 1][0] - mid) > 0) a = m;
                    else b = m;
                }
                x0 = 0.5 * (a + b);
                break;
            }
        c.orbit.eps = eps;
        c.orbit.max_local_error = tr.max_local_error;
        for (double s = -opt.window; s < tr.x.front() - x0; s += opt.tail_step) {
            double r = opt.seed_offset * std::exp(mu * (s - (tr.x.front() - x0)));
            c.orbit.X.push_back(s);
            c.orbit.Y.push_back({from.V + sgn * r * u[0], sgn * r * u[1]});
        }
        for (std::size_t i = 0; i < tr.x.size(); ++i) {
            c.orbit.X.push_back(tr.x[i] - x0);
            c.orbit.Y.push_back(tr.y[i]);
        }
        c.endpoint_error = std::hypot(c.orbit.Y.back()[0] - to.V, c.orbit.Y.back()[1]);
        // Invariant triangle with c1 = lambda/2 and c2 = 2 mu_u, lambda = -dg/dW.
        double lam = -ode.dg(0.0, 0.0, eps)[1], c1 = lam / 2, c2 = 2 * mu;
        for (std::size_t i = 0; i < c.orbit.X.size(); ++i) {
            const auto& y = c.orbit.Y[i];
            bool inside = y[1] < 0 && y[1] + c1 * (y[0] - to.V) > 0 && y[1] - c2 * (y[0] - from.V) > 0;
            c.in_triangle = c.in_triangle && inside;
            if (i > 0) c.monotone = c.monotone && (y[0] - c.orbit.Y[i - 1][0]) * sgn > 0;
        }
        return c;
    }

    // Reversible: shoot to the symmetry line, then reflect.
    bool homoclinic = from.V == to.V;
    double mid = 0.5 * (from.V + to.V);
    if (!homoclinic) {
        if (to.kind != EqKind::saddle) fail_pre("heteroclinic connection must end at a saddle");
        double half = 0.5 * (to.V - from.V);
        for (double s : {0.3, 0.7}) {
            double d = ode.g(mid + s * half, 0.0, eps) + ode.g(mid - s * half, 0.0, eps);
            double sc = std::abs(ode.g(mid + s * half, 0.0, eps)) + 1e-300;
            if (std::abs(d) > 1e-8 * sc) fail_num("connection not found: rest points are not symmetric");
        }
    }
    c.kind = homoclinic ? "homoclinic" : "heteroclinic";
    std::function<double(double, const State<2>&)> event;
    if (homoclinic) event = [](double, const State<2>& y) { return y[1]; };
    else event = [mid](double, const State<2>& y) { return y[0] - mid; };
    auto tr = integrate<2>(rhs, 0.0, seed, 2 * opt.window, opt.ctl, event);
    if (!tr.event) fail_num("connection not found: no crossing within the shooting window");
    double xe = tr.x.back();
    c.crossing = homoclinic ? tr.y.back()[0] : tr.y.back()[1];
    c.orbit.eps = eps;
    c.orbit.max_local_error = tr.max_local_error;
    std::vector<double> X;
    std::vector<State<2>> Y;
    for (double s = -opt.window; s < -xe; s += opt.tail_step) {
        double r = opt.seed_offset * std::exp(mu * (s + xe));
        X.push_back(s);
        Y.push_back({from.V + sgn * r * u[0], sgn * r * u[1]});
    }
    for (std::size_t i = 0; i < tr.x.size(); ++i) {
        X.push_back(tr.x[i] - xe);
        Y.push_back(tr.y[i]);
    }
    std::size_t n = X.size();
    c.orbit.X = X;
    c.orbit.Y = Y;
    if (homoclinic) Y.back()[1] = 0.0;
    else Y.back()[0] = mid;
    c.orbit.Y.back() = Y.back();
    for (std::size_t i = n - 1; i-- > 0;) {
        c.orbit.X.push_back(-X[i]);
        if (homoclinic) c.orbit.Y.push_back({Y[i][0], -Y[i][1]});
        else c.orbit.Y.push_back({2 * mid - Y[i][0], Y[i][1]});
    }
    c.endpoint_error = std::hypot(c.orbit.Y.back()[0] - to.V, c.orbit.Y.back()[1]);
    return c;
}

// ------------------------------------------------------------ linearization

using Mat2 = std::array<std::array<double, 2>, 2>;

inline Mat2 mat_mul(const Mat2& a, const Mat2& b) {
    Mat2 r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return r;
}

struct Variational {
    std::vector<Mat2> local;     // propagator from sample i to i+1
    std::vector<Mat2> phi;       // composed from the first sample
    double tangent_residual = 0.0;  // max |d_{i+1} - M_i d_i| with d = (W, g), relative to sup |d|
    double max_wronskian_defect = 0.0;  // max_i |det M_i / exp(int g_W) - 1|
};

/// Fundamental matrix of v'' = g_V v + g_W v' along a sampled orbit.
inline Variational linearize_along(const ReducedODE& ode, const Orbit& orbit, const StepControl& ctl = {}) {
    if (orbit.X.size() < 2) fail_pre("orbit needs at least two samples");
    double eps = orbit.eps;
    Rhs<6> rhs = [&](double, const State<6>& z) {
        double g = ode.g(z[0], z[1], eps);
        auto d = ode.dg(z[0], z[1], eps);
        // columns of Phi stored as (z2, z4) and (z3, z5)
        return State<6>{z[1], g, z[4], z[5], d[0] * z[2] + d[1] * z[4], d[0] * z[3] + d[1] * z[5]};
    };
    Variational out;
    Mat2 P{{{1, 0}, {0, 1}}};
    out.phi.push_back(P);
    double sup = 0.0, res = 0.0;
    auto tangent = [&](const State<2>& y) { return std::array<double, 2>{y[1], ode.g(y[0], y[1], eps)}; };
    for (const auto& y : orbit.Y) {
        auto d = tangent(y);
        sup = std::max({sup, std::abs(d[0]), std::abs(d[1])});
    }
    for (std::size_t i = 0; i + 1 < orbit.X.size(); ++i) {
        State<6> z0{orbit.Y[i][0], orbit.Y[i][1], 1, 0, 0, 1};
        auto tr = integrate<6>(rhs, orbit.X[i], z0, orbit.X[i + 1], ctl);
        const auto& z = tr.y.back();
        Mat2 M{{{z[2], z[3]}, {z[4], z[5]}}};
        out.local.push_back(M);
        P = mat_mul(M, P);
        out.phi.push_back(P);
        auto d0 = tangent(orbit.Y[i]), d1 = tangent(orbit.Y[i + 1]);
        for (int r = 0; r < 2; ++r) res = std::max(res, std::abs(d1[r] - (M[r][0] * d0[0] + M[r][1] * d0[1])));
        // Liouville: det M_i = exp(int g_W) over the interval, trapezoid in X
        double gw0 = ode.dg(orbit.Y[i][0], orbit.Y[i][1], eps)[1];
        double gw1 = ode.dg(orbit.Y[i + 1][0], orbit.Y[i + 1][1], eps)[1];
        double expect = std::exp(0.5 * (gw0 + gw1) * (orbit.X[i + 1] - orbit.X[i]));
        double det = M[0][0] * M[1][1] - M[0][1] * M[1][0];
        out.max_wronskian_defect = std::max(out.max_wronskian_defect, std::abs(det / expect - 1.0));
    }
    out.tangent_residual = res / std::max(sup, 1e-300);
    return out;
}

}  // namespace cylcm
