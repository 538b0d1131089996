#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <random>

#include "cylcm/conjugate.hpp"

using namespace cylcm;

namespace {

struct Preset {
    Rational rho, omega, h0;
    std::optional<Rational> c0;
};

const Preset homogeneous{1, -9, Rational(2, 3), Rational(2)};
const Preset irrotational{Rational(1, 4), 0, Rational(2, 3), std::nullopt};
const Preset generic{Rational(25, 52), Rational(-9, 10), Rational(2, 3), Rational(1, 2)};
const Preset generic_critical{Rational(1, 28), -18, Rational(2, 3), Rational(1)};

// Flow force by quadrature: lower layer u = a1, upper u = a2 + omega (Y - H), and
// pressure K - u(H)^2/2 - Y in each layer.
double flow_force_quad(double H, double a1, double a2, double h, double c, double rho, double omega) {
    using boost::math::quadrature::gauss;
    double K = c * c / 2 + h;
    double lower = gauss<double, 20>::integrate([&](double) { return a1 * a1; }, 0.0, H) +
                   gauss<double, 20>::integrate([&](double Y) { return K - a1 * a1 / 2 - Y; }, 0.0, H);
    double upper = gauss<double, 20>::integrate(
        [&](double Y) {
            double u = a2 + omega * (Y - H);
            return u * u + K - a2 * a2 / 2 - Y;
        },
        H, 1.0);
    return lower + rho * upper;
}

double gap(const ConjugateSystem& sys, double h, const ConjugateSolution& s) {
    FlowState<double> st{h, s.hp, s.c, sys.rho_d(), sys.omega_d()};
    return flow_force(st, Side::upstream) - flow_force(st, Side::downstream);
}

}  // namespace

TEST(Solve, HomogeneousBranchIsLinear) {
    ConjugateSystem sys(homogeneous.rho, homogeneous.omega);
    for (double e : {-0.05, -0.01, 0.01, 0.05}) {
        double h = 2.0 / 3 + e;
        auto s = solve_conjugate(sys, h, 2.0 / 3 - e + 1e-3, 2 - 3 * e - 1e-3);
        EXPECT_NEAR(s.hp, 2.0 / 3 - e, 1e-12) << e;
        EXPECT_NEAR(s.c, 2 - 3 * e, 1e-12) << e;
        EXPECT_LE(s.residual, 1e-12);
    }
}

TEST(Solve, ConjugateStatesBalanceFluxAndFlowForce) {
    for (const auto& p : {homogeneous, generic, generic_critical}) {
        ConjugateSystem sys(p.rho, p.omega);
        auto b = branch_expand(sys, p.h0, *p.c0);
        for (double e : {-0.03, 0.03}) {
            double h = b.h0 + e;
            auto s = solve_conjugate(sys, h, b.hp_series(e), b.c_series(e));
            FlowState<double> st{h, s.hp, s.c, sys.rho_d(), sys.omega_d()};
            EXPECT_NEAR(st.bernoulli_up(), st.bernoulli_down(), 1e-12);
            EXPECT_NEAR(gap(sys, h, s), 0.0, 1e-12);
            EXPECT_NE(s.hp, h);
        }
    }
}

TEST(Solve, IrrotationalDownstreamPinned) {
    ConjugateSystem sys(irrotational.rho, irrotational.omega);
    double h0 = 2.0 / 3, c0 = std::sqrt(1.0 / 3);
    for (double e : {-0.04, 0.04}) {
        auto s = solve_conjugate(sys, h0 + e, h0 + 0.01, c0 + 0.01);
        EXPECT_NEAR(s.hp, h0, 1e-11);
        EXPECT_NEAR(s.c, c0, 1e-11);
        EXPECT_NEAR(gap(sys, h0 + e, s), 0.0, 1e-12);
    }
}

TEST(Solve, NoConjugateFlowFarAway) {
    ConjugateSystem sys(homogeneous.rho, homogeneous.omega);
    NewtonOptions opt;
    opt.max_iter = 3;
    EXPECT_THROW(solve_conjugate(sys, 0.5, 0.1, 40.0, opt), Error);
}

TEST(FlowForce, ClosedFormMatchesQuadrature) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        double H = 0.05 + 0.9 * u(rng), a1 = 4 * u(rng) - 2, a2 = 4 * u(rng) - 2, h = u(rng), c = 3 * u(rng),
               rho = 0.05 + 0.95 * u(rng), om = 20 * u(rng) - 10;
        double closed = flow_force_profile(H, a1, a2, h, c, rho, om);
        EXPECT_NEAR(closed, flow_force_quad(H, a1, a2, h, c, rho, om), 1e-11 * std::max(1.0, std::abs(closed)))
            << trial;
    }
}

TEST(FlowForce, StatesAgreeAtBasePoint) {
    FlowState<double> st{0.4, 0.4, 1.3, 0.6, -2.0};
    EXPECT_NEAR(st.c1p(), st.c, 1e-15);
    EXPECT_NEAR(st.c2p(), st.c, 1e-15);
    EXPECT_NEAR(flow_force(st, Side::upstream), flow_force(st, Side::downstream), 1e-15);
    EXPECT_NEAR(st.bernoulli_up(), st.bernoulli_down(), 1e-15);
}

TEST(Series, ExactCoefficients) {
    ConjugateSystem hom(homogeneous.rho, homogeneous.omega);
    auto a = series_coefficients<Rational>(hom, homogeneous.h0, *homogeneous.c0);
    EXPECT_EQ(a.hp1, -1);
    EXPECT_EQ(a.c1, -3);
    EXPECT_EQ(a.hp2, 0);
    EXPECT_EQ(a.c2, 0);
    ConjugateSystem gen(generic.rho, generic.omega);
    auto g = series_coefficients<Rational>(gen, generic.h0, *generic.c0);
    EXPECT_EQ(g.hp1, Rational(-179, 725));
    EXPECT_EQ(g.c1, Rational(-6, 29));
    ConjugateSystem gc(generic_critical.rho, generic_critical.omega);
    auto k = series_coefficients<Rational>(gc, generic_critical.h0, *generic_critical.c0);
    EXPECT_EQ(k.hp1, Rational(11, 10));
    EXPECT_EQ(k.c1, Rational(3, 4));
}

TEST(Series, MatchesFiniteDifferencesOfNewtonBranch) {
    for (const auto& p : {homogeneous, generic, generic_critical}) {
        ConjugateSystem sys(p.rho, p.omega);
        auto b = branch_expand(sys, p.h0, *p.c0);
        const double d = 1e-3;
        auto sp = solve_conjugate(sys, b.h0 + d, b.hp_series(d), b.c_series(d));
        auto sm = solve_conjugate(sys, b.h0 - d, b.hp_series(-d), b.c_series(-d));
        EXPECT_NEAR((sp.hp - sm.hp) / (2 * d), b.hp1, 1e-5);
        EXPECT_NEAR((sp.c - sm.c) / (2 * d), b.c1, 1e-5);
        EXPECT_NEAR((sp.hp - 2 * b.h0 + sm.hp) / (2 * d * d), b.hp2, 1e-4);
        EXPECT_NEAR((sp.c - 2 * b.c0 + sm.c) / (2 * d * d), b.c2, 1e-4);
    }
}

TEST(Series, TruncationErrorIsCubic) {
    ConjugateSystem sys(generic.rho, generic.omega);
    auto b = branch_expand(sys, generic.h0, *generic.c0);
    auto err = [&](double e) {
        auto s = solve_conjugate(sys, b.h0 + e, b.hp_series(e), b.c_series(e));
        return std::abs(s.hp - b.hp_series(e));
    };
    double r = err(0.04) / err(0.02);
    EXPECT_NEAR(std::log2(r), 3.0, 0.15);
}

TEST(Series, ExactAndFloatAgree) {
    ConjugateSystem sys(generic.rho, generic.omega);
    auto e = series_coefficients<Rational>(sys, generic.h0, *generic.c0);
    auto f = series_coefficients<double>(sys, 2.0 / 3, 0.5);
    EXPECT_NEAR(f.hp1, e.hp1.convert_to<double>(), 1e-13);
    EXPECT_NEAR(f.hp2, e.hp2.convert_to<double>(), 1e-13);
    EXPECT_NEAR(f.c1, e.c1.convert_to<double>(), 1e-13);
    EXPECT_NEAR(f.c2, e.c2.convert_to<double>(), 1e-13);
}

TEST(Branch, SamplesSymmetricAndConverged) {
    ConjugateSystem sys(generic.rho, generic.omega);
    auto b = branch_expand(sys, generic.h0, *generic.c0, 0.02);
    ASSERT_EQ(b.samples.size(), 40u);
    EXPECT_NEAR(b.samples.front().eps, -0.02, 1e-15);
    EXPECT_NEAR(b.samples.back().eps, 0.02, 1e-15);
    for (std::size_t i = 1; i < b.samples.size(); ++i) EXPECT_LT(b.samples[i - 1].eps, b.samples[i].eps);
    for (const auto& s : b.samples) {
        EXPECT_LE(s.residual, 1e-12);
        EXPECT_LT(std::abs(s.hp - b.hp_series(s.eps)), 1e-4);
    }
}

TEST(Branch, ExactVariantRejectsOffSetPoints) {
    ConjugateSystem sys(generic.rho, generic.omega);
    EXPECT_THROW(branch_expand(sys, Rational(2, 3), Rational(1, 3)), Error);
    EXPECT_THROW(branch_expand(sys, Rational(3, 2), Rational(1, 2)), Error);
    EXPECT_THROW(branch_expand(sys, 0.6, 0.5), Error);
}

TEST(Admissibility, Presets) {
    auto rep = [](const Preset& p, double c0) {
        ConjugateSystem sys(p.rho, p.omega);
        return check_admissibility(sys, p.h0.convert_to<double>(), c0);
    };
    auto hom = rep(homogeneous, 2.0);
    EXPECT_TRUE(hom.admissible());
    EXPECT_TRUE(hom.critical_layer);
    auto irr = rep(irrotational, std::sqrt(1.0 / 3));
    EXPECT_TRUE(irr.admissible());
    EXPECT_FALSE(irr.critical_layer);
    EXPECT_NEAR(irr.det_h_hp, 0.0, 1e-12);
    EXPECT_TRUE(rep(generic, 0.5).admissible());
    EXPECT_FALSE(rep(generic, 0.5).critical_layer);
    EXPECT_TRUE(rep(generic_critical, 1.0).critical_layer);
}

TEST(Admissibility, OffTheBifurcationSet) {
    ConjugateSystem sys(1, 0);
    auto r = check_admissibility(sys, 0.5, 0.5);
    EXPECT_FALSE(r.bifurcation);
    EXPECT_FALSE(r.admissible());
    EXPECT_FALSE(check_admissibility(sys, 1.5, 0.5).admissible());
    EXPECT_FALSE(check_admissibility(sys, 0.5, 0.0).admissible());
}

TEST(Admissibility, CubicSignCondition) {
    // (1 - rho) h0^3 + c0^2 (4 - 5 h0) changes sign with h0 for rho = 1.
    ConjugateSystem sys(1, -9);
    for (double h0 : bifurcation_depths(sys)) {
        double c0 = critical_speed(1.0, -9.0, h0);
        EXPECT_EQ(check_admissibility(sys, h0, c0).f300_positive, h0 < 0.8);
    }
}

TEST(CriticalSpeed, DispersionRoot) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        double rho = 0.05 + 0.9 * u(rng), om = 20 * u(rng) - 10, h0 = 0.05 + 0.9 * u(rng);
        double c = critical_speed(rho, om, h0);
        EXPECT_GT(c, 0.0);
        EXPECT_NEAR(dispersion(h0, c, rho, om), 0.0, 1e-12 * std::max(1.0, c * c / h0)) << trial;
    }
    EXPECT_THROW(critical_speed(1.0, 0.0, 0.5), Error);
    EXPECT_THROW(critical_speed(0.5, 0.0, 1.2), Error);
}

TEST(CriticalSpeed, ExactWhenRational) {
    EXPECT_EQ(critical_speed_exact(1, -9, Rational(2, 3)), Rational(2));
    EXPECT_EQ(critical_speed_exact(Rational(25, 52), Rational(-9, 10), Rational(2, 3)), Rational(1, 2));
    EXPECT_FALSE(critical_speed_exact(Rational(1, 4), 0, Rational(2, 3)));
}

TEST(BasePoint, DefaultDepthAndSpeed) {
    ConjugateSystem sys(generic_critical.rho, generic_critical.omega);
    auto depths = bifurcation_depths(sys);
    ASSERT_EQ(depths.size(), 3u);
    for (double h : depths) {
        double c = critical_speed(sys.rho_d(), sys.omega_d(), h);
        EXPECT_LT(std::abs(sys.pnew(h, h, c)), 1e-12);
        EXPECT_LT(std::abs(sys.dyn(h, h, c)), 1e-12);
    }
    auto b = base_point(sys, std::nullopt);
    ASSERT_TRUE(b.h0_exact && b.c0_exact);
    EXPECT_EQ(*b.h0_exact, Rational(2, 3));
    EXPECT_EQ(*b.c0_exact, Rational(1));
}

TEST(BasePoint, ExplicitSpeedKept) {
    ConjugateSystem sys(irrotational.rho, irrotational.omega);
    auto b = base_point(sys, Rational(2, 3));
    EXPECT_FALSE(b.c0_exact);
    EXPECT_NEAR(b.c0, std::sqrt(1.0 / 3), 1e-15);
    auto b2 = base_point(sys, Rational(2, 3), 0.5);
    EXPECT_EQ(b2.c0, 0.5);
    auto b3 = base_point(sys, Rational(2, 3), std::nullopt, Rational(1, 2));
    EXPECT_EQ(*b3.c0_exact, Rational(1, 2));
}

TEST(BasePoint, NoBifurcation) {
    // rho = 1, omega = 0: the dispersion root is complex everywhere.
    ConjugateSystem sys(1, 0);
    EXPECT_TRUE(bifurcation_depths(sys).empty());
    EXPECT_THROW(base_point(sys, std::nullopt), Error);
}

TEST(RationalCandidate, Convergents) {
    auto r = rational_candidate(0.3333333333333333, [](const Rational& q) { return q == Rational(1, 3); });
    EXPECT_EQ(r, Rational(1, 3));
    EXPECT_FALSE(rational_candidate(std::sqrt(2.0), [](const Rational&) { return false; }));
}
