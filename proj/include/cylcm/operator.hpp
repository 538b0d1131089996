#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "cylcm/error.hpp"

namespace cylcm {

enum class BcKind { dirichlet, neumann, robin };

/// Endpoint condition a'(y) dw/dn + g w = 0 with outward normal n. Neumann is g = 0.
struct Boundary {
    BcKind kind = BcKind::dirichlet;
    double g = 0.0;

    static Boundary dirichlet() { return {BcKind::dirichlet, 0.0}; }
    static Boundary neumann() { return {BcKind::neumann, 0.0}; }
    static Boundary robin(double g) { return {BcKind::robin, g}; }
};

using Coef = std::function<double(double)>;

inline Coef constant(double v) {
    return [v](double) { return v; };
}

/// Transversal operator L'w = (a w')' + (b' + c) w on [y_lo, y_hi].
///
/// Coefficients are kept as callables so the same operator can be resampled on
/// a refined grid; `a_mid` and `q` cache the samples on the current grid.
class BaseOperator {
public:
    BaseOperator(double y_lo, double y_hi, int n, Coef a, Coef b, Coef c, Boundary lo, Boundary hi,
                 double y_eval, Coef db = nullptr)
        : y_lo_(y_lo), y_hi_(y_hi), n_(n), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)),
          db_(std::move(db)), lo_(lo), hi_(hi), y_eval_(y_eval) {
        if (!(y_lo_ < y_hi_)) fail_pre("operator interval must satisfy y_lo < y_hi");
        if (n_ < 16 || n_ % 2 != 0) fail_pre("grid size must be even and at least 16");
        if (!a_ || !c_) fail_pre("operator needs a' and c coefficients");
        if (y_eval_ < y_lo_ || y_eval_ > y_hi_) fail_pre("evaluation point outside the interval");
        sample();
    }

    double y_lo() const { return y_lo_; }
    double y_hi() const { return y_hi_; }
    int n() const { return n_; }
    double h() const { return (y_hi_ - y_lo_) / n_; }
    double y(int i) const { return y_lo_ + i * h(); }
    double y_eval() const { return y_eval_; }
    const Boundary& lo() const { return lo_; }
    const Boundary& hi() const { return hi_; }
    double theta() const { return theta_; }

    /// Node index of a point that must sit on the grid.
    int node_index(double yy) const {
        double s = (yy - y_lo_) / h();
        int i = static_cast<int>(std::lround(s));
        if (i < 0 || i > n_ || std::abs(s - i) > 1e-9) fail_pre("point is not a grid node");
        return i;
    }
    int eval_index() const { return node_index(y_eval_); }

    /// Same operator on a grid of m intervals.
    BaseOperator with_n(int m) const {
        return BaseOperator(y_lo_, y_hi_, m, a_, b_, c_, lo_, hi_, y_eval_, db_);
    }
    BaseOperator refined() const { return with_n(2 * n_); }

    std::vector<double> nodes() const {
        std::vector<double> ys(n_ + 1);
        for (int i = 0; i <= n_; ++i) ys[i] = y(i);
        return ys;
    }

    std::vector<double> sample(const Coef& f) const {
        std::vector<double> v(n_ + 1);
        for (int i = 0; i <= n_; ++i) v[i] = f(y(i));
        if (lo_.kind == BcKind::dirichlet) v[0] = 0.0;
        if (hi_.kind == BcKind::dirichlet) v[n_] = 0.0;
        return v;
    }

    /// First and last node carrying an unknown.
    int first() const { return lo_.kind == BcKind::dirichlet ? 1 : 0; }
    int last() const { return hi_.kind == BcKind::dirichlet ? n_ - 1 : n_; }
    int size() const { return last() - first() + 1; }

    const std::vector<double>& a_mid() const { return a_mid_; }
    const std::vector<double>& q() const { return q_; }

    /// Trapezoid weight of node i.
    double weight(int i) const { return (i == 0 || i == n_) ? 0.5 * h() : h(); }

    /// Symmetric stiffness form S (tridiagonal over unknown nodes); L' = W^{-1} S.
    double s_diag(int i) const {
        double hh = h();
        if (i == 0) return -a_mid_[0] / hh - lo_.g + 0.5 * hh * q_[0];
        if (i == n_) return -a_mid_[n_ - 1] / hh - hi_.g + 0.5 * hh * q_[n_];
        return -(a_mid_[i - 1] + a_mid_[i]) / hh + hh * q_[i];
    }
    double s_off(int i) const { return a_mid_[i] / h(); }  // couples i and i+1

    /// Discrete L'w at every node; Dirichlet nodes return 0.
    std::vector<double> apply(const std::vector<double>& w) const {
        std::vector<double> r(n_ + 1, 0.0);
        for (int i = first(); i <= last(); ++i) {
            double s = s_diag(i) * w[i];
            if (i > 0) s += s_off(i - 1) * w[i - 1];
            if (i < n_) s += s_off(i) * w[i + 1];
            r[i] = s / weight(i);
        }
        return r;
    }

    /// Quadratic form w^T S w in gradient form, free of cancellation.
    double energy(const std::vector<double>& w) const {
        double hh = h(), e = 0.0;
        for (int i = 0; i < n_; ++i) {
            double d = w[i + 1] - w[i];
            e -= a_mid_[i] * d * d / hh;
        }
        for (int i = first(); i <= last(); ++i) e += weight(i) * q_[i] * w[i] * w[i];
        if (lo_.kind != BcKind::dirichlet) e -= lo_.g * w[0] * w[0];
        if (hi_.kind != BcKind::dirichlet) e -= hi_.g * w[n_] * w[n_];
        return e;
    }

    double inner(const std::vector<double>& u, const std::vector<double>& v) const {
        double s = 0.0;
        for (int i = 0; i <= n_; ++i) s += weight(i) * u[i] * v[i];
        return s;
    }

private:
    void sample() {
        double hh = h();
        a_mid_.resize(n_);
        theta_ = INFINITY;
        for (int i = 0; i < n_; ++i) {
            a_mid_[i] = a_(y_lo_ + (i + 0.5) * hh);
            theta_ = std::min(theta_, a_mid_[i]);
        }
        q_.resize(n_ + 1);
        for (int i = 0; i <= n_; ++i) {
            double yi = y(i);
            theta_ = std::min(theta_, a_(yi));
            q_[i] = c_(yi) + bprime(yi);
        }
        if (!(theta_ > 0.0)) fail_pre("degenerate coefficient: a' must be positive on the grid");
    }

    double bprime(double yy) const {
        if (db_) return db_(yy);
        if (!b_) return 0.0;
        double d = 1e-5 * (y_hi_ - y_lo_);
        return (b_(yy + d) - b_(yy - d)) / (2 * d);
    }

    double y_lo_, y_hi_;
    int n_;
    Coef a_, b_, c_, db_;
    Boundary lo_, hi_;
    double y_eval_;
    double theta_ = 0.0;
    std::vector<double> a_mid_, q_;
};

}  // namespace cylcm
