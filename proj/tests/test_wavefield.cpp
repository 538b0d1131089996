#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "cylcm/wavefield.hpp"

using namespace cylcm;

namespace {

// Keeps the reduction alive for the field, which points into it.
struct Bore {
    ConjugateSystem sys;
    WaterReduction red;
    WaveField f;
    Bore(Rational rho, Rational om, Rational h0, Rational c0, double eps)
        : sys(rho, om), red(assemble_waterwave(sys, h0, c0)), f(reconstruct(sys, red, eps)) {}
    Bore(Rational rho, Rational om, double h0, double c0, double eps)
        : sys(rho, om), red(assemble_waterwave(sys, h0, c0)), f(reconstruct(sys, red, eps)) {}
};

std::unique_ptr<Bore> homogeneous(double eps) {
    return std::make_unique<Bore>(1, -9, Rational(2, 3), Rational(2), eps);
}

std::unique_ptr<Bore> generic(double eps) {
    return std::make_unique<Bore>(Rational(25, 52), Rational(-9, 10), Rational(2, 3), Rational(1, 2), eps);
}

}  // namespace

TEST(Field, ZeroAmplitudeIsUpstreamFlow) {
    auto b = homogeneous(0.0);
    const auto& f = b->f;
    EXPECT_EQ(f.hp, f.h);
    for (double x : {-100.0, 0.0, 3.0}) {
        EXPECT_EQ(f.eta(x), 0.0);
        for (double Y : {0.1, 0.5, 0.9}) {
            auto v = f.psi(x, Y);
            double s = Y - f.h;
            double expect = Y <= f.h ? -f.c * s : -f.c * s - 0.5 * f.omega * s * s;
            EXPECT_NEAR(v.psi, expect, 1e-15);
            EXPECT_EQ(v.x, 0.0);
        }
    }
    auto r = residual(f);
    EXPECT_EQ(r.kinematic_interface, 0.0);
    EXPECT_EQ(r.laplace1, 0.0);
    EXPECT_EQ(r.laplace2, 0.0);
    EXPECT_LE(r.dynamic, 1e-15);
    EXPECT_EQ(monotonicity_check(f).verdict, "trivial");
}

TEST(Field, AmplitudeMatchesConjugateDepth) {
    auto b = homogeneous(0.01);
    const auto& f = b->f;
    EXPECT_NEAR(f.hp, 2.0 / 3 - 0.01, 1e-12);
    EXPECT_NEAR(f.c, 2 - 0.03, 1e-12);
    EXPECT_NEAR(f.amp * f.a1, f.hp - f.h, 1e-15);
    EXPECT_NEAR(f.eta(-1e4), 0.0, 1e-12);
    EXPECT_NEAR(f.eta(1e4), f.hp - f.h, 1e-15);
    EXPECT_NEAR(f.eta(f.x_of(39.9)), f.hp - f.h, 1e-9);
    EXPECT_NEAR(f.eta(f.x_of(-39.9)), 0.0, 1e-9);
}

TEST(Field, WallsAndInterfaceAreStreamlines) {
    auto b = generic(0.02);
    const auto& f = b->f;
    for (double x = -f.x_window() * 1.2; x <= f.x_window() * 1.2; x += f.x_window() / 37) {
        EXPECT_NEAR(f.psi1(x, 0.0).psi, f.m1, 1e-14) << x;
        EXPECT_NEAR(f.psi2(x, 1.0).psi, -f.m2, 1e-14) << x;
        double H = f.interface(x);
        EXPECT_NEAR(f.psi1(x, H).psi, 0.0, 1e-14) << x;
        // Upper layer misses the interface at second order: psi2 = -omega eta^2 / 2 there.
        double e = H - f.h;
        if (x > f.x_window()) e = 0.0;
        EXPECT_NEAR(f.psi2(x, H).psi, -0.5 * f.omega * e * e, 1e-14) << x;
    }
}

TEST(Field, DownstreamUsesConjugateState) {
    auto b = generic(0.02);
    const auto& f = b->f;
    double x = 2 * f.x_window();
    for (double Y : {0.2, f.hp - 1e-3}) EXPECT_NEAR(f.psi(x, Y).Y, -f.c1p, 1e-15);
    auto v = f.psi2(x, 0.9);
    EXPECT_NEAR(v.Y, -f.c2p - f.omega * (0.9 - f.hp), 1e-14);
    // Matching at the window edge is first order in the tail.
    double xe = f.x_window() * (1 - 1e-9);
    EXPECT_NEAR(f.psi1(xe, 0.3).Y, -f.c1p, 1e-8);
}

TEST(Field, SlopeMatchesFiniteDifference) {
    auto b = generic(0.02);
    const auto& f = b->f;
    for (double X = -10; X <= 10; X += 0.73) {
        double x = f.x_of(X), d = 1e-3;
        double fd = (f.eta(x + d) - f.eta(x - d)) / (2 * d);
        double fd2 = (f.eta(x + d) - 2 * f.eta(x) + f.eta(x - d)) / (d * d);
        auto e3 = f.eta3(x);
        EXPECT_NEAR(e3[1], fd, 1e-9) << X;
        EXPECT_NEAR(e3[2], fd2, 1e-6) << X;
    }
}

TEST(Field, ResidualsShrinkWithAmplitude) {
    auto r1 = residual(homogeneous(0.01)->f);
    auto r2 = residual(homogeneous(0.005)->f);
    EXPECT_LE(r1.kinematic_walls, 1e-14);
    EXPECT_NEAR(std::log2(r1.kinematic_interface / r2.kinematic_interface), 2.0, 0.05);
    EXPECT_GT(std::log2(r1.dynamic / r2.dynamic), 1.8);
    EXPECT_GT(std::log2(r1.laplace1 / r2.laplace1), 1.8);
}

TEST(Field, FlowForceDriftSecondOrder) {
    // Endpoint states balance exactly; the leading-order field in between drifts at O(eps^2).
    for (auto make : {generic, homogeneous}) {
        double d1 = flow_force_drift(make(0.01)->f), d2 = flow_force_drift(make(0.005)->f);
        EXPECT_NEAR(std::log2(d1 / d2), 2.0, 0.1);
        EXPECT_LT(d1, 0.05);
    }
}

TEST(Field, MonotoneProfiles) {
    // Homogeneous: hp - h = -2 eps.
    EXPECT_EQ(monotonicity_check(homogeneous(0.01)->f).verdict, "decreasing");
    EXPECT_EQ(monotonicity_check(homogeneous(-0.01)->f).verdict, "increasing");
}

TEST(Field, ChannelExitRejected) {
    ConjugateSystem sys(1, -9);
    auto red = assemble_waterwave(sys, Rational(2, 3), Rational(2));
    EXPECT_THROW(reconstruct(sys, red, 0.4), Error);
}

TEST(CriticalLayer, HomogeneousHeight) {
    auto b = homogeneous(0.01);
    const auto& f = b->f;
    auto cl = critical_layer(f);
    EXPECT_NEAR(cl.upstream, f.h - f.c / f.omega, 0.0);
    EXPECT_TRUE(cl.sign_pattern);
    EXPECT_NEAR(cl.Y.front(), cl.upstream, 1e-9);
    // Composed and downstream forms of psi2 differ at O(eps^2) at the window edge.
    EXPECT_NEAR(cl.Y.back(), f.hp - f.c2p / f.omega, 10 * f.eps * f.eps);
    for (std::size_t i = 0; i < cl.x.size(); ++i) EXPECT_NEAR(f.psi2(cl.x[i], cl.Y[i]).Y, 0.0, 1e-13);
}

TEST(CriticalLayer, UpstreamHeightAtZeroAmplitude) {
    auto b = homogeneous(0.0);
    EXPECT_NEAR(critical_layer(b->f).upstream, 2.0 / 3 + 2.0 / 9, 1e-15);
}

TEST(CriticalLayer, AbsentWithoutVorticity) {
    Bore b(Rational(1, 4), 0, 2.0 / 3, std::sqrt(1.0 / 3), 0.01);
    EXPECT_THROW(critical_layer(b.f), Error);
    EXPECT_THROW(eye_bounds(b.f), Error);
    EXPECT_EQ(monotonicity_check(b.f).verdict, "decreasing");
    // Downstream pinned at h0, so hp - h = -eps.
    EXPECT_NEAR(b.f.hp - b.f.h, -0.01, 1e-11);
}

TEST(Eye, CollapsesAtZeroAmplitude) {
    auto e = eye_bounds(homogeneous(0.0)->f);
    EXPECT_EQ(e.half_width(), 0.0);
    EXPECT_NEAR(e.lower, 8.0 / 9, 1e-15);
}

TEST(Eye, HalfWidthSquareRootLaw) {
    for (double eps : {0.02, 0.01, 0.005}) {
        auto b = homogeneous(eps);
        auto e = eye_bounds(b->f);
        double asym = eye_half_width_asymptotic(2.0 / 3, 2.0, -9.0, -2.0, eps);
        EXPECT_NEAR(asym, std::sqrt(24 * eps) / 9, 1e-15);
        // The homogeneous branch is linear in eps, so the square-root law is exact here.
        EXPECT_NEAR(e.half_width() / asym, 1.0, 1e-12);
        // Bounds are level crossings of the downstream stream function.
        for (double y : {e.lower, e.upper}) {
            double s = y - b->f.hp;
            EXPECT_NEAR(-b->f.c2p * s - 0.5 * b->f.omega * s * s, e.level, 1e-13);
        }
    }
    EXPECT_THROW(eye_bounds(homogeneous(-0.01)->f), Error);
    EXPECT_THROW(eye_half_width_asymptotic(2.0 / 3, 2.0, -9.0, -2.0, -0.01), Error);
}

TEST(Eye, HalfWidthConvergesOnCurvedBranch) {
    double prev = INFINITY;
    for (double eps : {-0.02, -0.01, -0.005}) {
        Bore b(Rational(1, 28), -18, Rational(2, 3), Rational(1), eps);
        double rel = std::abs(eye_bounds(b.f).half_width() / eye_half_width_asymptotic(2.0 / 3, 1.0, -18.0, 0.1, eps) - 1);
        EXPECT_LT(rel, prev) << eps;
        prev = rel;
    }
    EXPECT_LT(prev, 0.05);
}

TEST(Streamline, InterfaceTraceStaysOnInterface) {
    auto b = generic(0.02);
    const auto& f = b->f;
    auto s = streamline(f, 0.0, f.interface(0.0));
    EXPECT_EQ(s.label, "through");
    EXPECT_NEAR(s.level, 0.0, 1e-15);
    for (std::size_t i = 0; i < s.x.size(); ++i) EXPECT_NEAR(s.Y[i], f.interface(s.x[i]), 1e-6);
}

TEST(Streamline, LevelConservedAndLabels) {
    auto b = homogeneous(0.01);
    const auto& f = b->f;
    auto eye = eye_bounds(f);
    double x = f.x_of(20.0);
    auto through = streamline(f, x, 0.3);
    EXPECT_EQ(through.label, "through");
    EXPECT_FALSE(through.has_turn);
    for (std::size_t i = 0; i < through.x.size(); ++i) EXPECT_NEAR(f.psi(through.x[i], through.Y[i]).psi, through.level, 1e-11);
    double span = eye.upper - eye.lower;
    StreamlineOptions opt;
    opt.h0 = 5e-4;
    opt.hmax = 0.25;
    auto inner = streamline(f, x, eye.lower + 0.2 * span, opt);
    EXPECT_EQ(inner.label, "eye");
    EXPECT_TRUE(inner.has_turn);
    EXPECT_LT(inner.turn_x, x);
}

TEST(Streamline, Preconditions) {
    EXPECT_THROW(streamline(homogeneous(0.0)->f, 0.0, 0.5), Error);
    EXPECT_THROW(streamline(homogeneous(0.01)->f, 0.0, 1.0), Error);
}
