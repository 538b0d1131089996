#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "cylcm/error.hpp"
#include "cylcm/rational_poly.hpp"

namespace cylcm {

enum ConjVar : std::size_t { vH = 0, vHP = 1, vC = 2, vRHO = 3, vOM = 4 };
using QPoly = Poly<Rational, 5>;

inline const std::array<const char*, 5>& conj_names() {
    static const std::array<const char*, 5> n{"h", "hp", "c", "rho", "omega"};
    return n;
}

/// Dynamic-condition polynomial in (h, hp, c, rho, omega).
inline QPoly poly_dyn_general() {
    const QPoly h = QPoly::var(vH), hp = QPoly::var(vHP), c = QPoly::var(vC), r = QPoly::var(vRHO),
                w = QPoly::var(vOM);
    const QPoly c2 = c * c, hp2 = hp * hp;
    return w * w * hp2 * (hp - h) * (2 - hp - h).pow(2) * r +
           4 * hp2 * (2 * hp2 - c2 * hp - 4 * hp - c2 * h + 2 * c2 + 2) * r + 4 * c * w * (1 - h) * hp2 * (2 - hp - h) * r -
           4 * (1 - hp).pow(2) * (2 * hp2 - c2 * hp - c2 * h);
}

/// Flow-force polynomial in (h, hp, c, rho, omega).
inline QPoly poly_flow_general() {
    const QPoly h = QPoly::var(vH), hp = QPoly::var(vHP), c = QPoly::var(vC), r = QPoly::var(vRHO),
                w = QPoly::var(vOM);
    const QPoly c2 = c * c;
    return w * w * hp * (hp - h) * (hp + 3 * h - 4) * r + 12 * hp * (hp - c2 - 1) * r + 12 * c * w * (h - 1) * hp * r -
           12 * (hp - 1) * (hp - c2);
}

/// Exact record of the desingularization: D0 = q F0, 2h(h-1) = s q and
/// (hp - h) P_new = 2h(h-1) P_flow - s P_dyn.
struct DivisionCertificate {
    QPoly q, s, bracket;
    bool exact = false;
    bool reconstructs = false;
};

/// Conjugate-flow system at fixed density ratio and vorticity.
class ConjugateSystem {
public:
    ConjugateSystem(const Rational& rho, const Rational& omega, const Rational& dyn_perturbation = 0)
        : rho_(rho), omega_(omega) {
        if (!(rho > 0 && rho <= 1)) fail_pre("density ratio must lie in (0, 1]");
        auto fix = [&](const QPoly& p) { return p.substitute(vRHO, QPoly(rho)).substitute(vOM, QPoly(omega)); };
        dyn_ = fix(poly_dyn_general());
        if (dyn_perturbation != 0) {
            QPoly::Exps e{};
            e[vHP] = 4;
            dyn_ += QPoly::term(dyn_perturbation, e);
        }
        flow_ = fix(poly_flow_general());
        desingularize();
        for (std::size_t i = 0; i < 3; ++i) {
            d_dyn_[i] = dyn_.diff(i);
            d_new_[i] = new_.diff(i);
            for (std::size_t j = 0; j < 3; ++j) {
                dd_dyn_[i][j] = d_dyn_[i].diff(j);
                dd_new_[i][j] = d_new_[i].diff(j);
            }
        }
    }

    const Rational& rho() const { return rho_; }
    const Rational& omega() const { return omega_; }
    double rho_d() const { return static_cast<double>(rho_); }
    double omega_d() const { return static_cast<double>(omega_); }
    const QPoly& dyn() const { return dyn_; }
    const QPoly& flow() const { return flow_; }
    const QPoly& pnew() const { return new_; }
    const DivisionCertificate& certificate() const { return cert_; }

    template <class T>
    static std::array<T, 5> point(const T& h, const T& hp, const T& c) {
        return {h, hp, c, T(0), T(0)};
    }

    template <class T>
    T dyn(const T& h, const T& hp, const T& c) const { return dyn_.eval(point(h, hp, c)); }
    template <class T>
    T flow(const T& h, const T& hp, const T& c) const { return flow_.eval(point(h, hp, c)); }
    template <class T>
    T pnew(const T& h, const T& hp, const T& c) const { return new_.eval(point(h, hp, c)); }

    /// d P_conj / d(h, hp, c), rows (dyn, new).
    template <class T>
    std::array<std::array<T, 3>, 2> jacobian(const T& h, const T& hp, const T& c) const {
        auto x = point(h, hp, c);
        std::array<std::array<T, 3>, 2> J;
        for (std::size_t i = 0; i < 3; ++i) {
            J[0][i] = d_dyn_[i].eval(x);
            J[1][i] = d_new_[i].eval(x);
        }
        return J;
    }

    template <class T>
    std::array<std::array<std::array<T, 3>, 3>, 2> hessian(const T& h, const T& hp, const T& c) const {
        auto x = point(h, hp, c);
        std::array<std::array<std::array<T, 3>, 3>, 2> H;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                H[0][i][j] = dd_dyn_[i][j].eval(x);
                H[1][i][j] = dd_new_[i][j].eval(x);
            }
        return H;
    }

private:
    void desingularize() {
        const QPoly h = QPoly::var(vH), hp = QPoly::var(vHP);
        QPoly d0 = dyn_.substitute(vHP, h), f0 = flow_.substitute(vHP, h);
        auto [q, r1] = d0.divide(f0);
        QPoly lead = 2 * h * (h - 1);
        auto [s, r2] = lead.divide(q);
        cert_.q = q;
        cert_.s = s;
        cert_.bracket = lead * flow_ - s * dyn_;
        auto [pn, r3] = cert_.bracket.divide(hp - h);
        cert_.exact = r1.is_zero() && r2.is_zero() && r3.is_zero() && !q.is_zero();
        if (!cert_.exact) fail_num("desingularization failed: conjugate-flow division is not exact");
        new_ = pn;
        cert_.reconstructs = (hp - h) * new_ == cert_.bracket;
        if (!cert_.reconstructs) fail_num("desingularization failed: division certificate does not reconstruct");
    }

    Rational rho_, omega_;
    QPoly dyn_, flow_, new_;
    DivisionCertificate cert_;
    std::array<QPoly, 3> d_dyn_, d_new_;
    std::array<std::array<QPoly, 3>, 3> dd_dyn_, dd_new_;
};

/// Upstream and downstream x-independent states sharing fluxes.
template <class T>
struct FlowState {
    T h, hp, c, rho, omega;

    T m1() const { return c * h; }
    T m2() const { return c * (1 - h) + omega * (1 - h) * (1 - h) / 2; }
    T c1p() const { return m1() / hp; }
    T c2p() const { return (m2() - omega * (1 - hp) * (1 - hp) / 2) / (1 - hp); }
    T bernoulli_up() const { return (rho - 1) * c * c / 2; }
    T bernoulli_down() const { return (rho * c2p() * c2p() - c1p() * c1p()) / 2 + (rho - 1) * (hp - h); }
};

enum class Side { upstream, downstream };

/// Flow force of a layered state with interface at H, uniform lower velocity
/// a1 and upper shear a2 + omega (Y - H), by exact antiderivatives.
template <class T>
T flow_force_profile(const T& H, const T& a1, const T& a2, const T& h, const T& c, const T& rho, const T& omega) {
    T K = c * c / 2 + h;
    T L = 1 - H;
    T lower = H * (a1 * a1 / 2 + K) - H * H / 2;
    T upper = a2 * a2 * L / 2 + a2 * omega * L * L + omega * omega * L * L * L / 3 - L * L / 2 - H * L + K * L;
    return lower + rho * upper;
}

template <class T>
T flow_force(const FlowState<T>& s, Side side) {
    if (side == Side::upstream) return flow_force_profile(s.h, s.c, s.c, s.h, s.c, s.rho, s.omega);
    return flow_force_profile(s.hp, s.c1p(), s.c2p(), s.h, s.c, s.rho, s.omega);
}

struct ConjugateSolution {
    double hp = 0.0, c = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

struct NewtonOptions {
    double tol = 1e-12;
    int max_iter = 50;
    int max_halvings = 8;
};

/// Newton on P_conj(h, ., .) = 0 from a guess (hp, c).
inline ConjugateSolution solve_conjugate(const ConjugateSystem& sys, double h, double hp, double c,
                                         const NewtonOptions& opt = {}) {
    auto norm = [&](double a, double b) {
        return std::max(std::abs(sys.dyn(h, a, b)), std::abs(sys.pnew(h, a, b)));
    };
    double r = norm(hp, c);
    for (int it = 0; it < opt.max_iter; ++it) {
        if (r <= opt.tol) return {hp, c, r, it};
        auto J = sys.jacobian(h, hp, c);
        double a = J[0][1], b = J[0][2], d = J[1][1], e = J[1][2];
        double det = a * e - b * d;
        double scale = std::max({std::abs(a * e), std::abs(b * d), 1e-300});
        if (std::abs(det) <= 1e-14 * scale) fail_num("nondegeneracy failed: singular conjugate-flow Jacobian");
        double f0 = sys.dyn(h, hp, c), f1 = sys.pnew(h, hp, c);
        double dhp = -(e * f0 - b * f1) / det, dc = -(-d * f0 + a * f1) / det;
        double t = 1.0, rn = norm(hp + dhp, c + dc);
        for (int k = 0; k < opt.max_halvings && rn > r; ++k) {
            t *= 0.5;
            rn = norm(hp + t * dhp, c + t * dc);
        }
        hp += t * dhp;
        c += t * dc;
        r = rn;
        if (!std::isfinite(r)) break;
    }
    if (r <= opt.tol) return {hp, c, r, opt.max_iter};
    fail_num("no conjugate flow near guess");
}

/// First and second order branch coefficients at a base point, plus the
/// three Jacobian determinants that govern nondegeneracy.
template <class T>
struct SeriesCoefficients {
    T hp1, hp2, c1, c2;
    T det_h_hp;   // det d(P)/d(h, hp)
    T det_sum_c;  // det (P_h + P_hp, P_c); nonzero iff hp1 != 1
    T det_hp_c;   // det d(P)/d(hp, c); the implicit-function condition with h as parameter
};

template <class T>
SeriesCoefficients<T> series_coefficients(const ConjugateSystem& sys, const T& h0, const T& c0) {
    auto J = sys.jacobian(h0, h0, c0);
    auto H = sys.hessian(h0, h0, c0);
    SeriesCoefficients<T> s;
    s.det_h_hp = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    s.det_sum_c = (J[0][0] + J[0][1]) * J[1][2] - J[0][2] * (J[1][0] + J[1][1]);
    s.det_hp_c = J[0][1] * J[1][2] - J[0][2] * J[1][1];
    if (s.det_hp_c == T(0)) fail_pre("nondegeneracy violated: det dP/d(hp, c) = 0");
    if (s.det_sum_c == T(0)) fail_pre("nondegeneracy violated: det(P_h + P_hp, P_c) = 0, so hp1 = 1");
    auto solve = [&](const T& r0, const T& r1, T& x, T& y) {
        x = (r0 * J[1][2] - J[0][2] * r1) / s.det_hp_c;
        y = (J[0][1] * r1 - r0 * J[1][1]) / s.det_hp_c;
    };
    solve(-J[0][0], -J[1][0], s.hp1, s.c1);
    std::array<T, 3> D{T(1), s.hp1, s.c1};
    std::array<T, 2> q{T(0), T(0)};
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) q[r] += H[r][i][j] * D[i] * D[j];
    solve(-q[0] / 2, -q[1] / 2, s.hp2, s.c2);
    return s;
}

struct BranchSample {
    double eps, h, hp, c, residual;
};

/// Family (h0 + eps, hp(eps), c(eps)) of conjugate flows.
struct ConjugateBranch {
    double h0 = 0.0, c0 = 0.0, rho = 1.0, omega = 0.0;
    double hp1 = 0.0, hp2 = 0.0, c1 = 0.0, c2 = 0.0;
    double det_h_hp = 0.0, det_sum_c = 0.0, det_hp_c = 0.0;
    std::optional<SeriesCoefficients<Rational>> exact;
    std::vector<BranchSample> samples;

    double hp_series(double e) const { return h0 + hp1 * e + hp2 * e * e; }
    double c_series(double e) const { return c0 + c1 * e + c2 * e * e; }
};

/// Newton-continued samples from the base point out to eps_max in steps of d_eps.
inline std::vector<BranchSample> continue_branch(const ConjugateSystem& sys, const ConjugateBranch& b, double eps_max,
                                                 double d_eps = 1e-3) {
    std::vector<BranchSample> out;
    int steps = static_cast<int>(std::lround(std::abs(eps_max) / d_eps));
    double sgn = eps_max < 0 ? -1.0 : 1.0;
    double hp_prev = b.h0, c_prev = b.c0, e_prev = 0.0;
    for (int k = 1; k <= steps; ++k) {
        double e = sgn * k * d_eps;
        // Series predictor, corrected by the drift of the previous sample.
        double hp_g = b.hp_series(e), c_g = b.c_series(e);
        if (k > 1) {
            hp_g += hp_prev - b.hp_series(e_prev);
            c_g += c_prev - b.c_series(e_prev);
        }
        auto s = solve_conjugate(sys, b.h0 + e, hp_g, c_g);
        out.push_back({e, b.h0 + e, s.hp, s.c, s.residual});
        hp_prev = s.hp;
        c_prev = s.c;
        e_prev = e;
    }
    return out;
}

inline void check_base_point(const ConjugateSystem& sys, double h0, double c0) {
    if (!(h0 > 0 && h0 < 1)) fail_pre("base depth must lie in (0, 1)");
    if (c0 == 0.0) fail_pre("base Froude number must be nonzero");
    double r = std::max(std::abs(sys.dyn(h0, h0, c0)), std::abs(sys.pnew(h0, h0, c0)));
    if (r > 1e-10) fail_pre("base point is not on the bifurcation set");
}

inline ConjugateBranch branch_expand(const ConjugateSystem& sys, double h0, double c0, double eps_max = 0.0) {
    check_base_point(sys, h0, c0);
    auto s = series_coefficients<double>(sys, h0, c0);
    ConjugateBranch b{h0, c0, sys.rho_d(), sys.omega_d(), s.hp1, s.hp2, s.c1, s.c2, s.det_h_hp, s.det_sum_c, s.det_hp_c, {}, {}};
    if (eps_max != 0.0) {
        auto neg = continue_branch(sys, b, -std::abs(eps_max));
        auto pos = continue_branch(sys, b, std::abs(eps_max));
        for (auto it = neg.rbegin(); it != neg.rend(); ++it) b.samples.push_back(*it);
        for (auto& p : pos) b.samples.push_back(p);
    }
    return b;
}

/// Exact variant for rational base points; double fields are the rounded exact values.
inline ConjugateBranch branch_expand(const ConjugateSystem& sys, const Rational& h0, const Rational& c0,
                                     double eps_max = 0.0) {
    if (!(h0 > 0 && h0 < 1)) fail_pre("base depth must lie in (0, 1)");
    if (sys.dyn(h0, h0, c0) != 0 || sys.pnew(h0, h0, c0) != 0) fail_pre("base point is not on the bifurcation set");
    auto s = series_coefficients<Rational>(sys, h0, c0);
    auto d = [](const Rational& v) { return static_cast<double>(v); };
    ConjugateBranch b{d(h0), d(c0), sys.rho_d(), sys.omega_d(), d(s.hp1), d(s.hp2), d(s.c1), d(s.c2),
                      d(s.det_h_hp), d(s.det_sum_c), d(s.det_hp_c), {}, {}};
    b.exact = s;
    if (eps_max != 0.0) {
        auto neg = continue_branch(sys, b, -std::abs(eps_max));
        auto pos = continue_branch(sys, b, std::abs(eps_max));
        for (auto it = neg.rbegin(); it != neg.rend(); ++it) b.samples.push_back(*it);
        for (auto& p : pos) b.samples.push_back(p);
    }
    return b;
}

/// Long-wave dispersion function rho c omega + rho c^2/(1-h) + c^2/h + rho - 1.
template <class T>
T dispersion(const T& h, const T& c, const T& rho, const T& omega) {
    return rho * c * omega + rho * c * c / (1 - h) + c * c / h + rho - 1;
}

/// Largest root c0 of the dispersion function at depth h0.
inline double critical_speed(double rho, double omega, double h0) {
    if (!(h0 > 0 && h0 < 1)) fail_pre("base depth must lie in (0, 1)");
    double a = rho / (1 - h0) + 1 / h0, b = rho * omega, c = rho - 1;
    double disc = b * b - 4 * a * c;
    if (disc < 0) fail_pre("no real critical speed");
    double r = (-b + std::sqrt(disc)) / (2 * a);
    if (!(r > 0)) fail_pre("no positive critical speed");
    return r;
}

/// Continued-fraction convergents of x with denominator up to max_den; the
/// first one accepted by `ok`.
template <class Pred>
std::optional<Rational> rational_candidate(double x, Pred ok, long long max_den = 1000000) {
    using boost::multiprecision::cpp_int;
    cpp_int p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = x;
    for (int k = 0; k < 40; ++k) {
        double a = std::floor(r);
        cpp_int ai = static_cast<long long>(a);
        cpp_int p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        Rational cand(p2, q2);
        if (ok(cand)) return cand;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (r - a < 1e-15) break;
        r = 1 / (r - a);
    }
    return std::nullopt;
}

/// The same root as an exact rational when it is one (denominator up to 10^6).
inline std::optional<Rational> critical_speed_exact(const Rational& rho, const Rational& omega, const Rational& h0) {
    double x = critical_speed(static_cast<double>(rho), static_cast<double>(omega), static_cast<double>(h0));
    return rational_candidate(x, [&](const Rational& c) { return dispersion<Rational>(h0, c, rho, omega) == 0; });
}

/// Base depths h0 in (0, 1) where the critical speed also zeroes P_new, i.e. the
/// bifurcation points of this system, found by a sign scan along the dispersion curve.
inline std::vector<double> bifurcation_depths(const ConjugateSystem& sys, int samples = 400) {
    const double rho = sys.rho_d(), om = sys.omega_d();
    auto G = [&](double h) {
        double c = critical_speed(rho, om, h);
        return sys.pnew(h, h, c);
    };
    std::vector<double> out;
    double ha = 0.0, ga = 0.0;
    bool have = false;
    for (int i = 1; i < samples; ++i) {
        double h = static_cast<double>(i) / samples, g;
        try {
            g = G(h);
        } catch (const Error&) {
            have = false;
            continue;
        }
        if (g == 0.0) {
            out.push_back(h);
        } else if (have && ga != 0.0 && (ga < 0) != (g < 0)) {
            std::uintmax_t it = 200;
            auto [lo, hi] = boost::math::tools::toms748_solve(G, ha, h, ga, g,
                                                               boost::math::tools::eps_tolerance<double>(), it);
            out.push_back(0.5 * (lo + hi));
        }
        ha = h;
        ga = g;
        have = true;
    }
    return out;
}

/// Base point of a run; the exact fields are set when the point is rational.
struct BasePoint {
    double h0 = 0.0, c0 = 0.0;
    std::optional<Rational> h0_exact, c0_exact;
};

/// Completes a partial base point. A missing depth is the bifurcation depth
/// nearest 2/3; a missing speed is the positive dispersion root.
inline BasePoint base_point(const ConjugateSystem& sys, const std::optional<Rational>& h0,
                            const std::optional<double>& c0 = std::nullopt,
                            const std::optional<Rational>& c0_exact = std::nullopt) {
    BasePoint b;
    if (h0) {
        b.h0_exact = *h0;
    } else {
        auto depths = bifurcation_depths(sys);
        if (depths.empty()) fail_pre("no bifurcation point for this density ratio and vorticity");
        double best = depths.front();
        for (double h : depths)
            if (std::abs(h - 2.0 / 3) < std::abs(best - 2.0 / 3)) best = h;
        b.h0 = best;
        b.h0_exact = rational_candidate(
            best,
            [&](const Rational& h) {
                if (!(h > 0 && h < 1)) return false;
                auto c = critical_speed_exact(sys.rho(), sys.omega(), h);
                return c && sys.dyn(h, h, *c) == 0 && sys.pnew(h, h, *c) == 0;
            },
            1000);
    }
    if (b.h0_exact) b.h0 = static_cast<double>(*b.h0_exact);
    if (c0_exact) {
        b.c0_exact = c0_exact;
    } else if (c0) {
        b.c0 = *c0;
    } else if (b.h0_exact) {
        b.c0_exact = critical_speed_exact(sys.rho(), sys.omega(), *b.h0_exact);
    }
    if (b.c0_exact) b.c0 = static_cast<double>(*b.c0_exact);
    else if (!c0) b.c0 = critical_speed(sys.rho_d(), sys.omega_d(), b.h0);
    if (!b.h0_exact) b.c0_exact.reset();
    return b;
}

struct AdmissibilityReport {
    bool bifurcation = false;
    double residual = 0.0;
    double det_h_hp = 0.0, det_sum_c = 0.0, det_hp_c = 0.0;
    bool nondegenerate = false;
    bool f300_positive = false;
    bool critical_layer = false;

    bool admissible() const { return bifurcation && nondegenerate && f300_positive; }
};

inline AdmissibilityReport check_admissibility(const ConjugateSystem& sys, double h0, double c0) {
    AdmissibilityReport r;
    if (!(h0 > 0 && h0 < 1) || c0 == 0.0) return r;
    r.residual = std::max(std::abs(sys.dyn(h0, h0, c0)), std::abs(sys.pnew(h0, h0, c0)));
    r.bifurcation = r.residual <= 1e-12;
    auto J = sys.jacobian(h0, h0, c0);
    r.det_h_hp = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    r.det_sum_c = (J[0][0] + J[0][1]) * J[1][2] - J[0][2] * (J[1][0] + J[1][1]);
    r.det_hp_c = J[0][1] * J[1][2] - J[0][2] * J[1][1];
    double scale = 0.0;
    for (auto& row : J)
        for (double v : row) scale = std::max(scale, std::abs(v));
    double tiny = 1e-12 * scale * scale;
    r.nondegenerate = std::abs(r.det_hp_c) > tiny && std::abs(r.det_sum_c) > tiny;
    double rho = sys.rho_d(), om = sys.omega_d();
    r.f300_positive = (1 - rho) * h0 * h0 * h0 + c0 * c0 * (4 - 5 * h0) > 0;
    r.critical_layer = c0 * (c0 + (1 - h0) * om) < 0;
    return r;
}

}  // namespace cylcm
