#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cylcm/error.hpp"
#include "cylcm/operator.hpp"
#include "cylcm/spectrum.hpp"
#include "cylcm/tridiag.hpp"
#include "cylcm/xpoly.hpp"

namespace cylcm {

using Index = std::array<int, 3>;

inline std::string index_key(const Index& ix) {
    return std::to_string(ix[0]) + "," + std::to_string(ix[1]) + "," + std::to_string(ix[2]);
}

struct HierarchyOptions {
    int d_max = 6;
    double solve_tol = 1e-10;
    int max_refine = 40;
};

/// Transverse solves on one grid.
///
/// The discrete top eigenvalue is O(h^2) rather than zero, so the operator is
/// deflated along the discrete ground state. Its kernel is then exactly phi0
/// and solves on the complement are consistent to rounding.
class Transverse {
public:
    Transverse(const BaseOperator& op, double y_star) : op_(op) {
        auto pairs = detail::discrete_top(op_, 2);
        nu0_ = pairs.nu[0];
        nu1_ = pairs.nu[1];
        phi0_ = pairs.phi[0];
        istar_ = op_.node_index(y_star);
        double p = phi0_[istar_];
        if (std::abs(p) < 1e-8) fail_pre("ground state vanishes at the evaluation point");
        for (double& v : phi0_) v /= p;
        norm2_ = op_.inner(phi0_, phi0_);
        double gap = nu0_ - nu1_;
        shift_ = nu0_ < -0.01 * gap ? 0.0 : nu0_ + 0.01 * gap;
        for (int i = op_.first(); i <= op_.last(); ++i) {
            diag_.push_back(op_.s_diag(i) - shift_ * op_.weight(i));
            if (i < op_.last()) off_.push_back(op_.s_off(i));
        }
    }

    const BaseOperator& op() const { return op_; }
    const std::vector<double>& phi0() const { return phi0_; }
    int istar() const { return istar_; }
    double nu0_h() const { return nu0_; }
    std::size_t nodes() const { return phi0_.size(); }

    double kernel_coeff(const std::vector<double>& v) const { return op_.inner(v, phi0_) / norm2_; }

    void project(std::vector<double>& v) const {
        double s = kernel_coeff(v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= s * phi0_[i];
    }

    std::vector<double> apply(const std::vector<double>& g) const {
        auto r = op_.apply(g);
        double s = nu0_ * kernel_coeff(g);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= s * phi0_[i];
        return r;
    }

    struct Solution {
        std::vector<double> g;
        double solvability = 0.0;
        double residual = 0.0;
    };

    /// g with L'g = h - s phi0 and <g, phi0> = kernel_value; s is returned.
    Solution solve(std::vector<double> h, double kernel_value, const HierarchyOptions& opt = {}) const {
        if (h.size() != nodes()) fail_pre("right-hand side does not match the grid");
        zero_dirichlet(h);
        Solution out;
        out.solvability = kernel_coeff(h);
        project(h);
        double scale = 0.0;
        for (double v : h) scale = std::max(scale, std::abs(v));
        std::vector<double> g(nodes(), 0.0);
        double res = scale;
        for (int it = 0; it < opt.max_refine && res > 1e-15 * scale; ++it) {
            auto lg = apply(g);
            std::vector<double> r(nodes());
            for (std::size_t i = 0; i < r.size(); ++i) r[i] = h[i] - lg[i];
            zero_dirichlet(r);
            project(r);
            double nr = 0.0;
            for (double v : r) nr = std::max(nr, std::abs(v));
            if (it > 0 && nr >= 0.5 * res) break;
            res = nr;
            std::vector<double> rhs;
            for (int i = op_.first(); i <= op_.last(); ++i) rhs.push_back(op_.weight(i) * r[i]);
            auto dg = solve_tridiag(diag_, off_, rhs);
            std::vector<double> d(nodes(), 0.0);
            for (int i = op_.first(); i <= op_.last(); ++i) d[i] = dg[i - op_.first()];
            project(d);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += d[i];
        }
        auto lg = apply(g);
        out.residual = 0.0;
        for (int i = op_.first(); i <= op_.last(); ++i) out.residual = std::max(out.residual, std::abs(lg[i] - h[i]));
        if (out.residual > opt.solve_tol * std::max(1.0, scale))
            fail_num("transverse solve residual " + std::to_string(out.residual) + " above tolerance");
        double k = kernel_value / norm2_;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += k * phi0_[i];
        out.g = std::move(g);
        return out;
    }

private:
    void zero_dirichlet(std::vector<double>& v) const {
        if (op_.lo().kind == BcKind::dirichlet) v.front() = 0.0;
        if (op_.hi().kind == BcKind::dirichlet) v.back() = 0.0;
    }

    BaseOperator op_;
    std::vector<double> phi0_;
    double nu0_ = 0.0, nu1_ = 0.0, norm2_ = 1.0, shift_ = 0.0;
    int istar_ = 0;
    std::vector<double> diag_, off_;
};

/// (L Psi)_m = L' g_m + (m+1)(m+2) g_{m+2}, with the deflated discrete L'.
inline XPolyField apply_L(const Transverse& t, const XPolyField& f) {
    std::vector<std::vector<double>> out;
    for (int m = 0; m <= f.degree(); ++m) {
        auto r = t.apply(f.profile(m));
        if (m + 2 <= f.degree()) {
            const auto& up = f.profile(m + 2);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] += (m + 1.0) * (m + 2.0) * up[i];
        }
        out.push_back(std::move(r));
    }
    return XPolyField(std::move(out));
}

/// Psi with L Psi = rhs and Psi(0, y*) = d/dx Psi(0, y*) = 0.
inline XPolyField solve_bordered(const Transverse& t, const XPolyField& rhs, const HierarchyOptions& opt = {}) {
    if (rhs.nodes() != t.nodes()) fail_pre("right-hand side does not match the grid");
    const int d = rhs.degree();
    const std::size_t nn = t.nodes();
    std::vector<std::vector<double>> g(d + 3, std::vector<double>(nn, 0.0));
    double scale = std::max(rhs.max_abs(), 1e-300);
    for (int m = d; m >= 0; --m) {
        std::vector<double> target = rhs.coeff(m);
        for (std::size_t i = 0; i < nn; ++i) target[i] -= (m + 1.0) * (m + 2.0) * g[m + 2][i];
        auto sol = t.solve(target, 0.0, opt);
        double alpha = sol.solvability / ((m + 1.0) * (m + 2.0));
        if (std::abs(sol.solvability) <= 1e-13 * scale) alpha = 0.0;
        for (std::size_t i = 0; i < nn; ++i) g[m + 2][i] += alpha * t.phi0()[i];
        g[m] = std::move(sol.g);
    }
    // Kernel parts of g_0 and g_1 come from the point conditions at y*.
    for (int m = 0; m <= 1; ++m) {
        double k = -g[m][t.istar()];
        for (std::size_t i = 0; i < nn; ++i) g[m][i] += k * t.phi0()[i];
        g[m][t.istar()] = 0.0;
    }
    XPolyField out(std::move(g));
    if (out.degree() > opt.d_max) fail_pre("degree overflow, raise d_max");
    return out;
}

/// Second x-derivative at (0, y*).
inline double reduced_coefficient(const XPolyField& psi, int istar) {
    return psi.degree() >= 2 ? 2.0 * psi.profile(2)[istar] : 0.0;
}

/// Anticipated scaling lambda ~ eps^p, kappa ~ eps^n, amplitude ~ eps^q with
/// leading nonlinearity of order m.
struct ScalingPlan {
    int p = 1, n = 1, q = 1, m = 2;

    /// `lambda_order` is the order in lambda of the linear coefficient f_A.
    bool balanced(int lambda_order) const { return 2 * n == p * lambda_order && 2 * n == (m - 1) * q; }
};

struct PsiContext {
    const Transverse& t;
    const std::map<Index, XPolyField>& table;

    const XPolyField& at(const Index& ix) const {
        auto it = table.find(ix);
        if (it == table.end()) fail_pre("right-hand side needs entry " + index_key(ix) + " before it is solved");
        return it->second;
    }
    XPolyField zero() const { return XPolyField(t.nodes()); }
};

/// Hand-assembled multilinear expansion of one application.
struct ApplicationSpec {
    std::string name;
    BaseOperator op;
    double y_star = 0.0;
    std::vector<Index> J;
    std::function<XPolyField(const Index&, const PsiContext&)> rhs;
};

/// Reduction map coefficients, Richardson-extrapolated to the grid of `spec.op`.
struct PsiTable {
    std::map<Index, XPolyField> psi;
    std::vector<Index> J;
    double y_star = 0.0;
    int istar = 0;
    std::vector<double> y;

    double coefficient(const Index& ix) const {
        auto it = psi.find(ix);
        if (it == psi.end()) fail_pre("no entry " + index_key(ix) + " in the table");
        return reduced_coefficient(it->second, istar);
    }
};

namespace detail {

inline std::vector<Index> by_order(std::vector<Index> J) {
    std::stable_sort(J.begin(), J.end(), [](const Index& a, const Index& b) {
        return a[0] + a[1] + a[2] < b[0] + b[1] + b[2];
    });
    return J;
}

inline std::map<Index, XPolyField> solve_table(const ApplicationSpec& spec, const Transverse& t,
                                               const std::vector<Index>& order, const HierarchyOptions& opt) {
    std::map<Index, XPolyField> table;
    for (const auto& ix : order) {
        PsiContext ctx{t, table};
        XPolyField f = spec.rhs(ix, ctx);
        table.emplace(ix, solve_bordered(t, f, opt));
    }
    return table;
}

inline XPolyField extrapolate(const XPolyField& coarse, const XPolyField& fine) {
    int d = std::max(coarse.degree(), fine.degree());
    std::vector<std::vector<double>> g(d + 1, std::vector<double>(coarse.nodes()));
    for (int m = 0; m <= d; ++m) {
        auto c = coarse.coeff(m);
        auto f = fine.coeff(m);
        for (std::size_t i = 0; i < c.size(); ++i) g[m][i] = (4.0 * f[2 * i] - c[i]) / 3.0;
    }
    return XPolyField(std::move(g));
}

}  // namespace detail

/// Solve the hierarchy in increasing i+j+k on grids n and 2n and extrapolate.
inline PsiTable expand_reduction(const ApplicationSpec& spec, const std::vector<Index>& J,
                                 const HierarchyOptions& opt = {}) {
    auto order = detail::by_order(J);
    Transverse tc(spec.op, spec.y_star);
    Transverse tf(spec.op.refined(), spec.y_star);
    auto coarse = detail::solve_table(spec, tc, order, opt);
    auto fine = detail::solve_table(spec, tf, order, opt);
    PsiTable out;
    out.J = order;
    out.y_star = spec.y_star;
    out.istar = tc.istar();
    out.y = spec.op.nodes();
    for (const auto& ix : order) {
        auto e = detail::extrapolate(coarse.at(ix), fine.at(ix));
        // The point conditions hold exactly on each grid; keep them exact after combining.
        for (int m = 0; m <= std::min(1, e.degree()); ++m) e.profile(m)[out.istar] = 0.0;
        e.trim();
        out.psi.emplace(ix, std::move(e));
    }
    return out;
}

inline PsiTable expand_reduction(const ApplicationSpec& spec, const HierarchyOptions& opt = {}) {
    return expand_reduction(spec, spec.J, opt);
}

/// Transverse solve on one grid: returns g with L'g = h - s phi0, <g, phi0> = kernel_value.
inline Transverse::Solution solve_transverse_bvp(const BaseOperator& op, double y_star, const std::vector<double>& h,
                                                 double kernel_value, const HierarchyOptions& opt = {}) {
    return Transverse(op, y_star).solve(h, kernel_value, opt);
}

/// Same solve on grids n and 2n from a sampled right-hand side, extrapolated.
inline Transverse::Solution solve_transverse_bvp(const BaseOperator& op, double y_star, const Coef& h,
                                                 double kernel_value, const HierarchyOptions& opt = {}) {
    BaseOperator fine_op = op.refined();
    auto c = solve_transverse_bvp(op, y_star, op.sample(h), kernel_value, opt);
    auto f = solve_transverse_bvp(fine_op, y_star, fine_op.sample(h), kernel_value, opt);
    Transverse::Solution out;
    out.solvability = (4.0 * f.solvability - c.solvability) / 3.0;
    out.residual = std::max(c.residual, f.residual);
    out.g.resize(c.g.size());
    for (std::size_t i = 0; i < c.g.size(); ++i) out.g[i] = (4.0 * f.g[2 * i] - c.g[i]) / 3.0;
    return out;
}

}  // namespace cylcm
