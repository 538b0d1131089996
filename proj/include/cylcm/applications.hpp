#pragma once

#include <cmath>
#include <numbers>

#include "cylcm/hierarchy.hpp"
#include "cylcm/operator.hpp"
#include "cylcm/spectrum.hpp"

namespace cylcm {

// Anti-plane shear: w_yy + w on (-pi/2, pi/2), Dirichlet walls, y* = 0.
struct ElasticityParams {
    double b1 = -1.0;
    double lambda2 = 1.0;
    double b2 = 0.0;
    double w1 = 1.0;
    int grid = 512;
};

inline BaseOperator elasticity_operator(int n, double slope = -1.0) {
    constexpr double h = std::numbers::pi / 2;
    return BaseOperator(-h, h, n, constant(1.0), nullptr, constant(-slope), Boundary::dirichlet(),
                        Boundary::dirichlet(), 0.0);
}

inline ScalingPlan elasticity_scaling() { return {1, 1, 1, 3}; }

inline ApplicationSpec elasticity_spec(const ElasticityParams& p) {
    auto rhs = [p](const Index& ix, const PsiContext& ctx) {
        const auto& phi = ctx.t.phi0();
        if (ix == Index{1, 0, 2}) {
            auto f = phi;
            for (double& v : f) v *= p.b1 * p.lambda2;
            return XPolyField::monomial(0, f);
        }
        if (ix == Index{3, 0, 0}) {
            auto f = ctx.t.op().sample([](double y) { return std::sin(y) * std::sin(y) * std::cos(y); });
            for (std::size_t i = 0; i < f.size(); ++i) f[i] = p.b2 * phi[i] * phi[i] * phi[i] + 6.0 * p.w1 * f[i];
            return XPolyField::monomial(0, f);
        }
        return ctx.zero();
    };
    return ApplicationSpec{"elasticity", elasticity_operator(p.grid), 0.0,
                           {{1, 0, 1}, {0, 1, 1}, {1, 1, 0}, {2, 0, 0}, {1, 0, 2}, {2, 0, 1}, {3, 0, 0}}, rhs};
}

// Fisher-KPP: w_yy + rho0^2 w on (0, 1), Neumann at 0, Robin(beta) at 1, y* = 0.
struct FkppParams {
    double beta = 1.0;
    double lambda1 = 3.0;
    double rho2 = 1.0;
    int grid = 512;
};

inline BaseOperator fkpp_operator(int n, double rho, double beta) {
    return BaseOperator(0.0, 1.0, n, constant(1.0), nullptr, constant(rho * rho), Boundary::neumann(),
                        Boundary::robin(beta), 0.0);
}

/// Critical rho0 in (0, pi/2) with top eigenvalue zero.
inline CriticalValue fkpp_critical(double beta, int n = 512) {
    if (!(beta > 0)) fail_pre("Robin coefficient must be positive");
    return critical_parameter([=](double r) { return fkpp_operator(n, r, beta); }, 0.0, std::numbers::pi / 2);
}

inline ScalingPlan fkpp_scaling() { return {1, 1, 2, 2}; }

inline ApplicationSpec fkpp_spec(const FkppParams& p, double rho0) {
    auto rhs = [p](const Index& ix, const PsiContext& ctx) {
        const auto& phi = ctx.t.phi0();
        if (ix == Index{0, 1, 1}) return XPolyField::monomial(0, phi) *= -p.lambda1;
        if (ix == Index{1, 0, 2}) {
            XPolyField f = XPolyField::monomial(0, phi) *= -p.rho2;
            return f += (-p.lambda1) * ctx.at({1, 0, 1}).derivative();
        }
        if (ix == Index{2, 0, 0}) {
            auto f = phi;
            for (double& v : f) v *= v;
            return XPolyField::monomial(0, f);
        }
        return ctx.zero();
    };
    return ApplicationSpec{"fkpp", fkpp_operator(p.grid, rho0, p.beta), 0.0,
                           {{1, 0, 1}, {0, 1, 1}, {1, 0, 2}, {2, 0, 0}}, rhs};
}

/// Closed-form quadratic coefficient: <cos^2, cos> / <cos, cos> on (0, 1).
inline double fkpp_sigma(double rho0) {
    double s = std::sin(rho0);
    return 4.0 * s * (3.0 - s * s) / (3.0 * (std::sin(2 * rho0) + 2 * rho0));
}

}  // namespace cylcm
