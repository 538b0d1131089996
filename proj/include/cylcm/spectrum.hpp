#pragma once

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "cylcm/error.hpp"
#include "cylcm/operator.hpp"

namespace cylcm {

struct EigenOptions {
    /// Relative residual target. The effective bound never drops below
    /// 8 eps |L'_h|_inf, the rounding floor of a double eigenvector.
    double residual_tol = 1e-10;
};

/// One eigenpair of L'. `nu` and `phi` are Richardson-extrapolated from grids
/// n and 2n; `nu_h` and `phi_h` are the discrete pair on grid n, which is what
/// the residual refers to. Both profiles have unit trapezoid L2 norm.
struct EigenPair {
    double nu = 0.0;
    double nu_h = 0.0;
    std::vector<double> phi;
    std::vector<double> phi_h;
    double residual = 0.0;
};

namespace detail {

struct DiscretePairs {
    std::vector<double> nu;
    std::vector<std::vector<double>> phi;
};

// Gaussian elimination with partial pivoting on (S - shift W) x = W v in
// extended precision. One step of inverse iteration at a Rayleigh shift brings
// a double eigenvector from O(n eps |S|) residual down to the stencil's own
// rounding floor.
inline void polish(const BaseOperator& op, std::vector<double>& phi, double shift) {
    using ld = long double;
    const int m = op.size(), f = op.first();
    std::vector<ld> lo(m, 0), di(m), up(m, 0), up2(m, 0), b(m);
    for (int k = 0; k < m; ++k) {
        di[k] = static_cast<ld>(op.s_diag(f + k)) - static_cast<ld>(shift) * op.weight(f + k);
        if (k + 1 < m) up[k] = lo[k + 1] = op.s_off(f + k);
        b[k] = static_cast<ld>(op.weight(f + k)) * phi[f + k];
    }
    for (int k = 0; k + 1 < m; ++k) {
        if (std::abs(lo[k + 1]) > std::abs(di[k])) {
            std::swap(di[k], lo[k + 1]);
            std::swap(up[k], di[k + 1]);
            std::swap(up2[k], up[k + 1]);
            std::swap(b[k], b[k + 1]);
        }
        if (di[k] == 0) di[k] = std::numeric_limits<double>::epsilon() * std::abs(op.s_diag(f + k));
        ld l = lo[k + 1] / di[k];
        di[k + 1] -= l * up[k];
        up[k + 1] -= l * up2[k];
        b[k + 1] -= l * b[k];
    }
    if (di[m - 1] == 0) di[m - 1] = std::numeric_limits<double>::epsilon();
    std::vector<ld> x(m);
    for (int k = m - 1; k >= 0; --k) {
        ld s = b[k];
        if (k + 1 < m) s -= up[k] * x[k + 1];
        if (k + 2 < m) s -= up2[k] * x[k + 2];
        x[k] = s / di[k];
    }
    ld nrm = 0, dot = 0;
    for (int k = 0; k < m; ++k) {
        nrm += op.weight(f + k) * x[k] * x[k];
        dot += op.weight(f + k) * x[k] * phi[f + k];
    }
    ld sc = (dot < 0 ? -1 : 1) / std::sqrt(nrm);
    for (int k = 0; k < m; ++k) phi[f + k] = static_cast<double>(x[k] * sc);
}

inline DiscretePairs discrete_top(const BaseOperator& op, int count) {
    const int m = op.size(), f = op.first();
    if (count > m) fail_pre("more eigenpairs requested than grid unknowns");
    std::vector<double> d(m), e(std::max(m, 1)), sq(m);
    for (int k = 0; k < m; ++k) sq[k] = std::sqrt(op.weight(f + k));
    for (int k = 0; k < m; ++k) d[k] = op.s_diag(f + k) / (sq[k] * sq[k]);
    for (int k = 0; k + 1 < m; ++k) e[k] = op.s_off(f + k) / (sq[k] * sq[k + 1]);

    lapack_int found = 0;
    std::vector<double> w(m), z(static_cast<std::size_t>(m) * count);
    std::vector<lapack_int> support(2 * count);
    lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', m, d.data(), e.data(), 0.0, 0.0,
                                     m - count + 1, m, 0.0, &found, w.data(), z.data(), m, support.data());
    if (info != 0 || found != count)
        fail_num("tridiagonal eigensolver did not converge (info " + std::to_string(info) + ")");

    DiscretePairs out;
    for (int j = count - 1; j >= 0; --j) {
        std::vector<double> phi(op.n() + 1, 0.0);
        for (int k = 0; k < m; ++k) phi[f + k] = z[static_cast<std::size_t>(j) * m + k] / sq[k];
        polish(op, phi, op.energy(phi) / op.inner(phi, phi));
        double nrm = std::sqrt(op.inner(phi, phi));
        for (double& v : phi) v /= nrm;
        out.nu.push_back(op.energy(phi) / op.inner(phi, phi));
        out.phi.push_back(std::move(phi));
    }
    return out;
}

inline double value_at(const BaseOperator& op, const std::vector<double>& v, double yy) {
    double s = (yy - op.y_lo()) / op.h();
    int i = std::clamp(static_cast<int>(std::floor(s)), 0, op.n() - 1);
    double t = s - i;
    return (1 - t) * v[i] + t * v[i + 1];
}

// Positive at the evaluation point for the ground state; higher modes use the
// node of largest magnitude so that the choice is stable under refinement.
inline void fix_sign(const BaseOperator& op, std::vector<double>& phi, int k) {
    double ref;
    if (k == 0) {
        ref = value_at(op, phi, op.y_eval());
    } else {
        auto it = std::max_element(phi.begin(), phi.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        ref = *it;
    }
    if (ref < 0)
        for (double& v : phi) v = -v;
}

}  // namespace detail

inline double residual_of(const BaseOperator& op, const std::vector<double>& phi, double nu) {
    auto lw = op.apply(phi);
    double r = 0.0, mx = 0.0;
    for (int i = op.first(); i <= op.last(); ++i) {
        r = std::max(r, std::abs(lw[i] - nu * phi[i]));
        mx = std::max(mx, std::abs(phi[i]));
    }
    return r / mx;
}

inline double operator_norm(const BaseOperator& op) {
    double mx = 0.0;
    for (int i = op.first(); i <= op.last(); ++i) {
        double s = std::abs(op.s_diag(i));
        if (i > 0) s += std::abs(op.s_off(i - 1));
        if (i < op.n()) s += std::abs(op.s_off(i));
        mx = std::max(mx, s / op.weight(i));
    }
    return mx;
}

inline double residual_bound(const BaseOperator& op, const EigenOptions& opt) {
    return std::max(opt.residual_tol, 8.0 * std::numeric_limits<double>::epsilon() * operator_norm(op));
}

/// The `count` largest eigenvalues of L', strictly decreasing.
inline std::vector<EigenPair> eigen_lowest(const BaseOperator& op, int count, const EigenOptions& opt = {}) {
    if (count < 1) fail_pre("eigenpair count must be at least 1");
    const BaseOperator fine = op.refined();
    auto coarse = detail::discrete_top(op, count);
    auto dense = detail::discrete_top(fine, count);

    std::vector<EigenPair> out;
    for (int k = 0; k < count; ++k) {
        EigenPair p;
        p.nu_h = coarse.nu[k];
        p.nu = (4.0 * dense.nu[k] - coarse.nu[k]) / 3.0;
        p.phi_h = coarse.phi[k];
        detail::fix_sign(op, p.phi_h, k);
        auto& pf = dense.phi[k];
        double overlap = 0.0;
        for (int i = 0; i <= op.n(); ++i) overlap += p.phi_h[i] * pf[2 * i];
        double sgn = overlap < 0 ? -1.0 : 1.0;
        p.phi.resize(op.n() + 1);
        for (int i = 0; i <= op.n(); ++i) p.phi[i] = (4.0 * sgn * pf[2 * i] - p.phi_h[i]) / 3.0;
        p.residual = residual_of(op, p.phi_h, p.nu_h);
        if (!(p.residual <= residual_bound(op, opt)))
            fail_num("eigenpair " + std::to_string(k) + " residual " + std::to_string(p.residual) +
                     " exceeds tolerance");
        out.push_back(std::move(p));
    }
    for (int k = 1; k < count; ++k)
        if (!(out[k].nu < out[k - 1].nu)) fail_num("eigenvalues are not strictly decreasing");
    return out;
}

/// Discrete Rayleigh quotient on spacing h and 2h, Richardson-combined.
inline double rayleigh(const BaseOperator& op, const std::vector<double>& w) {
    if (static_cast<int>(w.size()) != op.n() + 1) fail_pre("profile does not match the operator grid");
    double den = op.inner(w, w);
    if (!(den > 0.0)) fail_pre("Rayleigh quotient of the zero profile");
    double r_h = op.energy(w) / den;
    BaseOperator half = op.with_n(op.n() / 2);
    std::vector<double> sub(half.n() + 1);
    for (int i = 0; i <= half.n(); ++i) sub[i] = w[2 * i];
    double den2 = half.inner(sub, sub);
    if (!(den2 > 0.0)) return r_h;
    double r_2h = half.energy(sub) / den2;
    return (4.0 * r_h - r_2h) / 3.0;
}

struct CriticalValue {
    double p = 0.0;
    double nu0 = 0.0;
    double nu1 = 0.0;
};

struct CriticalOptions {
    double bracket_tol = 1e-12;
    double eigen_tol = 1e-10;
    double simplicity_gap = 1e-6;
    EigenOptions eigen{};
};

/// Parameter value in [lo, hi] where the top eigenvalue of family(p) vanishes.
inline CriticalValue critical_parameter(const std::function<BaseOperator(double)>& family, double lo, double hi,
                                        const CriticalOptions& opt = {}) {
    auto nu0 = [&](double p) { return eigen_lowest(family(p), 1, opt.eigen)[0].nu; };
    double f_lo = nu0(lo), f_hi = nu0(hi);
    if (f_lo == 0.0) hi = lo;
    else if (f_hi == 0.0) lo = hi;
    else if ((f_lo > 0) == (f_hi > 0)) fail_pre("no critical value: top eigenvalue keeps its sign on the bracket");

    double p = lo;
    if (lo != hi) {
        std::uintmax_t iters = 200;
        auto tol = [&](double a, double b) { return std::abs(b - a) <= opt.bracket_tol; };
        auto r = boost::math::tools::toms748_solve(nu0, lo, hi, f_lo, f_hi, tol, iters);
        double fa = nu0(r.first), fb = nu0(r.second);
        p = std::abs(fa) <= std::abs(fb) ? r.first : r.second;
    }
    auto pairs = eigen_lowest(family(p), 2, opt.eigen);
    CriticalValue cv{p, pairs[0].nu, pairs[1].nu};
    if (std::abs(cv.nu0) > opt.eigen_tol)
        fail_num("critical parameter search stalled with |nu0| = " + std::to_string(std::abs(cv.nu0)));
    if (!(cv.nu1 < -opt.simplicity_gap)) fail_num("simplicity violated: nu1 is also near zero");
    return cv;
}

}  // namespace cylcm
