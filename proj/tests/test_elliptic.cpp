#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kinslab/elliptic.hpp"

using namespace kinslab;

namespace {

constexpr double kPi = std::numbers::pi;

MacroField sample(const PhaseSpace& ps, double (*fn)(double)) {
    MacroField m{std::vector<double>(ps.nx())};
    for (std::size_t i = 0; i < ps.nx(); ++i) m.values[i] = fn(ps.space.centers[i]);
    return m;
}

double max_error(const EllipticSolution& sol, const PhaseSpace& ps, double (*exact)(double)) {
    double e = 0.0;
    for (std::size_t i = 0; i < ps.nx(); ++i) e = std::max(e, std::abs(sol.u[i] - exact(ps.space.centers[i])));
    return e;
}

// u - u'' = 1 with n u' + u = 0: u = 1 + A cosh(x - 1/2).
double robin_exact(double x) {
    const double a = -1.0 / (std::sinh(0.5) + std::cosh(0.5));
    return 1.0 + a * std::cosh(x - 0.5);
}

}  // namespace

TEST(Elliptic, DirichletManufacturedSolutionConvergesAtSecondOrder) {
    double previous = 0.0;
    for (int nx : {32, 64, 128}) {
        const PhaseSpace ps = build_phase_space(nx, 8, 4.0, PotentialSpec{});
        const auto source = sample(ps, [](double x) { return (1.0 + kPi * kPi) * std::sin(kPi * x); });
        const EllipticSolution sol = solve_robin(source, RobinCoefficients::homogeneous_dirichlet(), ps);
        const double err = max_error(sol, ps, [](double x) { return std::sin(kPi * x); });
        if (previous > 0.0) {
            EXPECT_NEAR(std::log2(previous / err), 2.0, 0.2);
        }
        previous = err;
        EXPECT_LE(sol.robin_residual[0], 1e-12);
    }
}

TEST(Elliptic, RobinClosedFormSolution) {
    double previous = 0.0;
    for (int nx : {32, 64, 128}) {
        const PhaseSpace ps = build_phase_space(nx, 8, 4.0, PotentialSpec{});
        const auto source = sample(ps, [](double) { return 1.0; });
        const EllipticSolution sol = solve_robin(source, RobinCoefficients::uniform(1.0), ps);
        const double err = max_error(sol, ps, robin_exact);
        if (previous > 0.0) {
            EXPECT_GT(std::log2(previous / err), 1.8);
        }
        previous = err;
        EXPECT_NEAR(sol.wall_value[0], robin_exact(0.0), 1e-3);
    }
}

TEST(Elliptic, SummationByPartsIsExact) {
    const PhaseSpace ps = build_phase_space(40, 8, 4.0, PotentialSpec{PotentialKind::Cosine, 0.5, {}, {}});
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0.0, 1.0);
    for (const RobinCoefficients& c : {RobinCoefficients::uniform(0.0), RobinCoefficients::uniform(2.0),
                                       RobinCoefficients::homogeneous_dirichlet()}) {
        MacroField u{std::vector<double>(ps.nx())}, w{std::vector<double>(ps.nx())};
        for (std::size_t i = 0; i < ps.nx(); ++i) {
            u.values[i] = n(rng);
            w.values[i] = n(rng);
        }
        const double lhs = inner_x(apply_robin_operator(u, c, ps), w, ps.measure);
        const double rhs = robin_bilinear_form(u, w, c, ps);
        EXPECT_NEAR(lhs, rhs, 1e-10 * (std::abs(lhs) + 1.0));
        EXPECT_NEAR(robin_bilinear_form(u, w, c, ps), robin_bilinear_form(w, u, c, ps), 1e-10);
        EXPECT_GE(robin_bilinear_form(u, u, c, ps), 0.0);
    }
}

TEST(Elliptic, InequalityReportOnRandomSources) {
    const PhaseSpace ps = build_phase_space(64, 8, 4.0, PotentialSpec{PotentialKind::Linear, 1.0, {}, {}});
    std::mt19937_64 rng(10);
    std::normal_distribution<double> n(0.0, 1.0);
    for (double cb : {0.0, 1.0, 1e3}) {
        for (int k = 0; k < 10; ++k) {
            MacroField s{std::vector<double>(ps.nx())};
            for (double& x : s.values) x = n(rng);
            const EllipticSolution sol = solve_robin(s, RobinCoefficients::uniform(cb), ps);
            const EllipticInequalityReport rep = elliptic_inequality_report(s, sol, ps);
            EXPECT_TRUE(rep.holds);
            EXPECT_GE(rep.lower_bound_slack, -1e-8);
            EXPECT_LE(rep.energy_identity_residual, 1e-8);
            EXPECT_GT(rep.pairing, 0.0);
            EXPECT_TRUE(std::isfinite(rep.regularity_ratio));
        }
    }
}

TEST(Elliptic, CoefficientsFromTheWalls) {
    BoundaryConfig cfg = BoundaryConfig::uniform(0.3, 0.2);
    cfg.walls[1] = {0.0, 0.0};
    const RobinCoefficients c = RobinCoefficients::from(cfg);
    EXPECT_DOUBLE_EQ(c.cb[0], 1.0);
    EXPECT_FALSE(c.dirichlet[0]);
    EXPECT_TRUE(c.dirichlet[1]);
}
