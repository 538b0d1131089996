#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cylcm/applications.hpp"
#include "cylcm/hierarchy.hpp"

using namespace cylcm;

namespace {

constexpr double pi = std::numbers::pi;

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::vector<double> sampled(const BaseOperator& op, double (*f)(double)) { return op.sample(f); }

// Smooth random profile vanishing on Dirichlet walls of the elasticity strip.
std::vector<double> random_profile(const BaseOperator& op, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double c1 = u(rng), c2 = u(rng), c3 = u(rng), c4 = u(rng);
    return op.sample([=](double y) {
        return c1 * std::cos(y) + c2 * std::sin(2 * y) + c3 * std::cos(3 * y) + c4 * std::cos(y) * std::cos(y) *
                                                                                       std::cos(y) * std::sin(y);
    });
}

}  // namespace

TEST(ApplyL, QuadraticTimesKernel) {
    Transverse t(elasticity_operator(512), 0.0);
    auto cosy = sampled(t.op(), [](double y) { return std::cos(y); });
    auto r = apply_L(t, XPolyField::monomial(2, cosy));
    auto two_cos = cosy;
    for (double& v : two_cos) v *= 2.0;
    EXPECT_LT(max_diff(r.coeff(0), two_cos), 1e-12);
    EXPECT_LT(max_diff(r.coeff(2), std::vector<double>(cosy.size(), 0.0)), 1e-10);
}

TEST(ApplyL, LinearTimesOddMode) {
    Transverse t(elasticity_operator(512), 0.0);
    auto s2 = sampled(t.op(), [](double y) { return std::sin(2 * y); });
    auto r = apply_L(t, XPolyField::monomial(1, s2));
    auto expect = s2;
    for (double& v : expect) v *= -3.0;
    EXPECT_LT(max_diff(r.coeff(1), expect), 1e-4);
    EXPECT_LT(max_diff(r.coeff(0), std::vector<double>(s2.size(), 0.0)), 1e-14);
}

TEST(Transverse, GroundStateNormalisedAtEvaluationPoint) {
    Transverse t(elasticity_operator(256), 0.0);
    EXPECT_EQ(t.istar(), 128);
    EXPECT_DOUBLE_EQ(t.phi0()[t.istar()], 1.0);
    auto lphi = t.apply(t.phi0());
    EXPECT_LT(max_diff(lphi, std::vector<double>(lphi.size(), 0.0)), 1e-10);
}

TEST(Transverse, RejectsEvaluationPointOnNodalLine) {
    auto op = BaseOperator(0.0, pi, 64, constant(1.0), nullptr, constant(0.0), Boundary::dirichlet(),
                           Boundary::dirichlet(), 0.0);
    EXPECT_THROW(Transverse(op, 0.0), Error);
}

TEST(TransverseBvp, SineModeAndKernelValue) {
    auto op = BaseOperator(0.0, pi, 256, constant(1.0), nullptr, constant(0.0), Boundary::dirichlet(),
                           Boundary::dirichlet(), pi / 2);
    // L' = d2/dy2 on (0, pi): top eigenvalue -1 is not zero, so the solve is regular.
    auto sol = solve_transverse_bvp(op, pi / 2, [](double y) { return std::sin(2 * y); }, 0.0);
    EXPECT_NEAR(sol.solvability, 0.0, 1e-10);
    for (int i = 0; i <= op.n(); ++i) EXPECT_NEAR(sol.g[i], -std::sin(2 * op.y(i)) / 4.0, 1e-7);
}

TEST(TransverseBvp, SolvabilityOfKernelForcing) {
    auto op = elasticity_operator(256);
    auto sol = solve_transverse_bvp(op, 0.0, [](double y) { return std::cos(y) + std::cos(3 * y); }, 0.5);
    EXPECT_NEAR(sol.solvability, 1.0, 1e-8);
    Transverse t(op, 0.0);
    EXPECT_NEAR(op.inner(sol.g, t.phi0()), 0.5, 1e-7);
    for (int i = 0; i <= op.n(); ++i) {
        double y = op.y(i);
        EXPECT_NEAR(sol.g[i], -std::cos(3 * y) / 8.0 + std::cos(y) / pi, 1e-7);
    }
}

TEST(Bordered, RoundTripOnRandomRightHandSides) {
    std::mt19937_64 rng(11);
    Transverse t(elasticity_operator(256), 0.0);
    for (int trial = 0; trial < 20; ++trial) {
        int d = static_cast<int>(rng() % 4);
        std::vector<std::vector<double>> g;
        for (int m = 0; m <= d; ++m) g.push_back(random_profile(t.op(), rng));
        XPolyField rhs(std::move(g));
        auto psi = solve_bordered(t, rhs);
        EXPECT_EQ(psi.degree(), d + 2);
        EXPECT_EQ(psi.coeff(0)[t.istar()], 0.0);
        EXPECT_EQ(psi.coeff(1)[t.istar()], 0.0);
        auto back = apply_L(t, psi);
        for (int m = 0; m <= d + 2; ++m)
            EXPECT_LT(max_diff(back.coeff(m), rhs.coeff(m)), 1e-9) << "trial " << trial << " m " << m;
    }
}

TEST(Bordered, DegreeOverflow) {
    Transverse t(elasticity_operator(64), 0.0);
    auto rhs = XPolyField::monomial(5, t.phi0());
    HierarchyOptions opt;
    opt.d_max = 6;
    EXPECT_THROW(solve_bordered(t, rhs, opt), Error);
    opt.d_max = 7;
    EXPECT_NO_THROW(solve_bordered(t, rhs, opt));
}

TEST(Bordered, ZeroRightHandSideGivesZeroField) {
    Transverse t(elasticity_operator(64), 0.0);
    auto psi = solve_bordered(t, XPolyField(t.nodes()));
    EXPECT_EQ(psi.max_abs(), 0.0);
}

TEST(Expansion, ElasticityClosedForms) {
    auto table = expand_reduction(elasticity_spec({}));
    auto& y = table.y;
    // Psi_102 = -x^2 cos y / 2.
    const auto& p102 = table.psi.at({1, 0, 2});
    ASSERT_EQ(p102.degree(), 2);
    for (std::size_t i = 0; i < y.size(); ++i) {
        EXPECT_NEAR(p102.coeff(2)[i], -std::cos(y[i]) / 2, 1e-9);
        EXPECT_NEAR(p102.coeff(0)[i], 0.0, 1e-9);
    }
    // Psi_300 = 3/4 x^2 cos y + 3/16 (cos 3y - cos y).
    const auto& p300 = table.psi.at({3, 0, 0});
    for (std::size_t i = 0; i < y.size(); ++i) {
        EXPECT_NEAR(p300.coeff(2)[i], 0.75 * std::cos(y[i]), 1e-8);
        EXPECT_NEAR(p300.coeff(0)[i], 3.0 / 16 * (std::cos(3 * y[i]) - std::cos(y[i])), 1e-8);
    }
    EXPECT_NEAR(table.coefficient({1, 0, 2}), -1.0, 1e-9);
    EXPECT_NEAR(table.coefficient({3, 0, 0}), 1.5, 1e-9);
    for (Index ix : {Index{1, 0, 1}, Index{0, 1, 1}, Index{1, 1, 0}, Index{2, 0, 0}, Index{2, 0, 1}})
        EXPECT_EQ(table.psi.at(ix).max_abs(), 0.0) << index_key(ix);
}

TEST(Expansion, ElasticityCoefficientsLinearInParameters) {
    ElasticityParams p;
    p.b1 = 2.0;
    p.lambda2 = 0.5;
    p.b2 = 1.0;
    p.w1 = -1.0;
    p.grid = 256;
    auto table = expand_reduction(elasticity_spec(p));
    EXPECT_NEAR(table.coefficient({1, 0, 2}), p.b1 * p.lambda2, 1e-9);
    // <cos^3, cos>/<cos, cos> = 3/4 and <6 sin^2 cos, cos>/<cos, cos> = 3/2.
    EXPECT_NEAR(table.coefficient({3, 0, 0}), 0.75 * p.b2 + 1.5 * p.w1, 1e-9);
}

TEST(Expansion, ElasticityEvenInY) {
    auto table = expand_reduction(elasticity_spec({}));
    const auto& p = table.psi.at({3, 0, 0});
    int n = static_cast<int>(table.y.size()) - 1;
    for (int m = 0; m <= p.degree(); ++m)
        for (int i = 0; i <= n; ++i) EXPECT_NEAR(p.coeff(m)[i], p.coeff(m)[n - i], 1e-12);
}

TEST(Expansion, FkppClosedForms) {
    FkppParams p;
    p.lambda1 = 3.0;
    p.rho2 = 0.7;
    double rho0 = fkpp_critical(p.beta).p;
    auto table = expand_reduction(fkpp_spec(p, rho0));
    const auto& y = table.y;
    const auto& p011 = table.psi.at({0, 1, 1});
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(p011.coeff(2)[i], -1.5 * std::cos(rho0 * y[i]), 1e-8);
    EXPECT_EQ(table.psi.at({1, 0, 1}).max_abs(), 0.0);
    EXPECT_NEAR(table.coefficient({0, 1, 1}), -p.lambda1, 1e-9);
    EXPECT_NEAR(table.coefficient({1, 0, 2}), -p.rho2, 1e-9);
    EXPECT_NEAR(table.coefficient({2, 0, 0}), fkpp_sigma(rho0), 1e-8);
}

TEST(Expansion, SigmaQuadratureOracle) {
    // Composite Simpson on <cos^2, cos>/<cos, cos> over (0, 1).
    for (double rho : {0.3, 0.86, 1.4}) {
        const int n = 2000;
        double num = 0.0, den = 0.0;
        for (int i = 0; i <= n; ++i) {
            double y = double(i) / n, w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2), c = std::cos(rho * y);
            num += w * c * c * c;
            den += w * c * c;
        }
        EXPECT_NEAR(fkpp_sigma(rho), num / den, 1e-12) << rho;
    }
}

TEST(Expansion, MissingDependencyReported) {
    auto spec = fkpp_spec({}, fkpp_critical(1.0).p);
    EXPECT_THROW(expand_reduction(spec, {{1, 0, 2}}), Error);
}

TEST(Scaling, Balance) {
    EXPECT_TRUE(elasticity_scaling().balanced(2));
    EXPECT_TRUE(fkpp_scaling().balanced(2));
    EXPECT_FALSE(fkpp_scaling().balanced(1));
    EXPECT_FALSE((ScalingPlan{1, 1, 1, 2}).balanced(2));
}
