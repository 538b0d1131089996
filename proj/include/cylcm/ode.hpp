#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "cylcm/error.hpp"

namespace cylcm {

template <std::size_t N>
using State = std::array<double, N>;

struct StepControl {
    double rtol = 1e-12;
    double atol = 1e-12;
    double h0 = 1e-3;
    double hmax = 0.5;
    double escape = 1e6;
    double event_tol = 1e-12;
    std::size_t max_steps = 2000000;
};

/// Continuous extension of one accepted Dormand-Prince step.
template <std::size_t N>
struct DenseStep {
    double x0 = 0.0, h = 0.0;
    std::array<State<N>, 5> r{};

    State<N> operator()(double x) const {
        double t = (x - x0) / h, t1 = 1.0 - t;
        State<N> y;
        for (std::size_t i = 0; i < N; ++i) y[i] = r[0][i] + t * (r[1][i] + t1 * (r[2][i] + t * (r[3][i] + t1 * r[4][i])));
        return y;
    }
    bool contains(double x) const {
        double a = std::min(x0, x0 + h), b = std::max(x0, x0 + h);
        return x >= a && x <= b;
    }
};

template <std::size_t N>
struct Trajectory {
    std::vector<double> x;
    std::vector<State<N>> y;
    std::vector<DenseStep<N>> dense;
    double max_local_error = 0.0;
    bool escaped = false;
    bool event = false;
    bool stopped = false;

    /// Dense-output value anywhere inside the integrated span.
    State<N> at(double X) const {
        if (dense.empty()) return y.front();
        auto it = std::lower_bound(dense.begin(), dense.end(), X, [](const DenseStep<N>& d, double v) {
            return d.h > 0 ? d.x0 + d.h < v : d.x0 + d.h > v;
        });
        if (it == dense.end()) --it;
        return (*it)(X);
    }
};

template <std::size_t N>
using Rhs = std::function<State<N>(double, const State<N>&)>;

/// Adaptive Dormand-Prince 5(4) from x0 towards x1 (either direction).
///
/// `event` stops the run at a sign change located on the dense output;
/// `stop` is checked after each accepted step.
template <std::size_t N>
Trajectory<N> integrate(const Rhs<N>& f, double x0, const State<N>& y0, double x1, const StepControl& ctl = {},
                        const std::function<double(double, const State<N>&)>& event = nullptr,
                        const std::function<bool(double, const State<N>&)>& stop = nullptr) {
    static constexpr double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
    static constexpr double a21 = 1. / 5;
    static constexpr double a31 = 3. / 40, a32 = 9. / 40;
    static constexpr double a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9;
    static constexpr double a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561, a54 = -212. / 729;
    static constexpr double a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247, a64 = 49. / 176,
                            a65 = -5103. / 18656;
    static constexpr double a71 = 35. / 384, a73 = 500. / 1113, a74 = 125. / 192, a75 = -2187. / 6784, a76 = 11. / 84;
    static constexpr double e1 = 71. / 57600, e3 = -71. / 16695, e4 = 71. / 1920, e5 = -17253. / 339200,
                            e6 = 22. / 525, e7 = -1. / 40;
    static constexpr double d1 = -12715105075. / 11282082432, d3 = 87487479700. / 32700410799,
                            d4 = -10690763975. / 1880347072, d5 = 701980252875. / 199316789632,
                            d6 = -1453857185. / 822651844, d7 = 69997945. / 29380423;

    Trajectory<N> out;
    out.x.push_back(x0);
    out.y.push_back(y0);
    if (x1 == x0) return out;
    const double dir = x1 > x0 ? 1.0 : -1.0;
    double x = x0, h = dir * std::min(ctl.h0, std::abs(x1 - x0));
    State<N> y = y0, k1 = f(x, y), k2, k3, k4, k5, k6, k7, yt, yn;
    double g_prev = event ? event(x, y) : 0.0;

    auto stage = [&](State<N>& k, double xc, auto&& comb) {
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * comb(i);
        k = f(xc, yt);
    };

    for (std::size_t step = 0; step < ctl.max_steps; ++step) {
        if (dir * (x + h - x1) > 0) h = x1 - x;
        stage(k2, x + c2 * h, [&](std::size_t i) { return a21 * k1[i]; });
        stage(k3, x + c3 * h, [&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; });
        stage(k4, x + c4 * h, [&](std::size_t i) { return a41 * k1[i] + a42 * k2[i] + a43 * k3[i]; });
        stage(k5, x + c5 * h, [&](std::size_t i) { return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]; });
        stage(k6, x + h, [&](std::size_t i) {
            return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i];
        });
        for (std::size_t i = 0; i < N; ++i)
            yn[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        k7 = f(x + h, yn);

        double err = 0.0, eabs = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double sc = ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(yn[i]));
            err += (e / sc) * (e / sc);
            eabs = std::max(eabs, std::abs(e));
        }
        err = std::sqrt(err / N);
        if (!std::isfinite(err)) fail_num("integrator produced a non-finite state");

        if (err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(x))) fail_num("integrator step size underflow");
            continue;
        }

        DenseStep<N> ds;
        ds.x0 = x;
        ds.h = h;
        for (std::size_t i = 0; i < N; ++i) {
            double dy = yn[i] - y[i], bspl = h * k1[i] - dy;
            ds.r[0][i] = y[i];
            ds.r[1][i] = dy;
            ds.r[2][i] = bspl;
            ds.r[3][i] = dy - h * k7[i] - bspl;
            ds.r[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        out.max_local_error = std::max(out.max_local_error, eabs);
        double xn = x + h;

        if (event) {
            double g_new = event(xn, yn);
            if (g_prev != 0.0 && (g_new == 0.0 || (g_new > 0) != (g_prev > 0))) {
                auto g = [&](double s) { return event(s, ds(s)); };
                double a = x, b = xn, ga = g_prev;
                while (std::abs(b - a) > ctl.event_tol * std::max(1.0, std::abs(a))) {
                    double m = 0.5 * (a + b), gm = g(m);
                    if (gm == 0.0) { a = b = m; break; }
                    if ((gm > 0) == (ga > 0)) { a = m; ga = gm; } else { b = m; }
                }
                double xe = 0.5 * (a + b);
                out.dense.push_back(ds);
                out.x.push_back(xe);
                out.y.push_back(ds(xe));
                out.event = true;
                return out;
            }
            g_prev = g_new;
        }

        out.dense.push_back(ds);
        x = xn;
        y = yn;
        k1 = k7;
        out.x.push_back(x);
        out.y.push_back(y);

        double mag = 0.0;
        for (double v : y) mag += std::abs(v);
        if (mag > ctl.escape) {
            out.escaped = true;
            return out;
        }
        if (stop && stop(x, y)) {
            out.stopped = true;
            return out;
        }
        if (dir * (x - x1) >= 0) return out;

        double fac = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
        h = dir * std::min(std::abs(h) * fac, ctl.hmax);
    }
    fail_num("integrator exceeded the step budget");
}

}  // namespace cylcm
