#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "cylcm/error.hpp"

namespace cylcm {

/// Field sum_m x^m g_m(y) with every profile sampled on one grid.
class XPolyField {
public:
    XPolyField() = default;
    explicit XPolyField(std::size_t nodes) : nodes_(nodes), g_(1, std::vector<double>(nodes, 0.0)) {}
    explicit XPolyField(std::vector<std::vector<double>> profiles) : g_(std::move(profiles)) {
        if (g_.empty()) fail_pre("field needs at least one profile");
        nodes_ = g_[0].size();
        for (const auto& p : g_)
            if (p.size() != nodes_) fail_pre("field profiles live on different grids");
        trim();
    }

    /// x^m p(y).
    static XPolyField monomial(int m, std::vector<double> p) {
        std::vector<std::vector<double>> g(m + 1, std::vector<double>(p.size(), 0.0));
        g[m] = std::move(p);
        return XPolyField(std::move(g));
    }

    int degree() const { return static_cast<int>(g_.size()) - 1; }
    std::size_t nodes() const { return nodes_; }
    const std::vector<double>& profile(int m) const { return g_.at(m); }
    std::vector<double>& profile(int m) { return g_.at(m); }

    /// Profile m, or zeros above the degree.
    std::vector<double> coeff(int m) const {
        if (m <= degree()) return g_[m];
        return std::vector<double>(nodes_, 0.0);
    }

    void ensure_degree(int d) {
        while (degree() < d) g_.emplace_back(nodes_, 0.0);
    }

    /// Drop trailing zero profiles, keeping at least the constant one.
    void trim() {
        while (g_.size() > 1 && std::all_of(g_.back().begin(), g_.back().end(), [](double v) { return v == 0.0; }))
            g_.pop_back();
    }

    double at(double x, std::size_t node) const {
        double s = 0.0;
        for (int m = degree(); m >= 0; --m) s = s * x + g_[m][node];
        return s;
    }

    /// Derivative in x of order k at (x, node).
    double dx(double x, std::size_t node, int k = 1) const {
        double s = 0.0;
        for (int m = degree(); m >= k; --m) {
            double f = 1.0;
            for (int r = 0; r < k; ++r) f *= m - r;
            s = s * x + f * g_[m][node];
        }
        return s;
    }

    XPolyField derivative() const {
        if (degree() == 0) return XPolyField(nodes_);
        std::vector<std::vector<double>> g(degree(), std::vector<double>(nodes_));
        for (int m = 1; m <= degree(); ++m)
            for (std::size_t i = 0; i < nodes_; ++i) g[m - 1][i] = m * g_[m][i];
        return XPolyField(std::move(g));
    }

    XPolyField& operator+=(const XPolyField& o) {
        ensure_degree(o.degree());
        for (int m = 0; m <= o.degree(); ++m)
            for (std::size_t i = 0; i < nodes_; ++i) g_[m][i] += o.g_[m][i];
        trim();
        return *this;
    }

    XPolyField& operator*=(double s) {
        for (auto& p : g_)
            for (double& v : p) v *= s;
        trim();
        return *this;
    }

    friend XPolyField operator+(XPolyField a, const XPolyField& b) { return a += b; }
    friend XPolyField operator*(double s, XPolyField a) { return a *= s; }

    double max_abs() const {
        double mx = 0.0;
        for (const auto& p : g_)
            for (double v : p) mx = std::max(mx, std::abs(v));
        return mx;
    }

private:
    std::size_t nodes_ = 0;
    std::vector<std::vector<double>> g_;
};

}  // namespace cylcm
