#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kinslab/boundary.hpp"
#include "kinslab/errors.hpp"

using namespace kinslab;

namespace {

PhaseSpace space() { return build_phase_space(8, 32, 8.0, PotentialSpec{PotentialKind::Cosine, 0.4, {}, {}}); }

WallTrace random_outgoing(const PhaseSpace& ps, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    WallTrace t = WallTrace::zeros(ps.nv());
    for (Wall w : kWalls)
        for (std::size_t j = 0; j < ps.nv(); ++j)
            if (ps.velocity.is_outgoing(w, j)) t.at(w)[j] = u(rng);
    return t;
}

}  // namespace

TEST(Boundary, DiffuseOperatorReproducesConstants) {
    const PhaseSpace ps = space();
    WallTrace t = WallTrace::zeros(ps.nv());
    for (Wall w : kWalls) std::fill(t.at(w).begin(), t.at(w).end(), 3.0);
    for (Wall w : kWalls) EXPECT_NEAR(diffuse_value(t, w, ps.velocity), 3.0, 1e-14);
}

TEST(Boundary, ClosureMatchesTheMaxwellRule) {
    const PhaseSpace ps = space();
    std::mt19937_64 rng(1);
    const BoundaryConfig cfg = BoundaryConfig::uniform(0.3, 0.5);
    WallTrace t = random_outgoing(ps, rng);
    apply_incoming_closure(t, cfg, ps.velocity);
    for (Wall w : kWalls) {
        const double d = diffuse_value(t, w, ps.velocity);
        for (std::size_t j = 0; j < ps.nv(); ++j) {
            if (ps.velocity.is_outgoing(w, j)) continue;
            EXPECT_NEAR(t.at(w)[j], 0.3 * d + 0.5 * t.at(w)[ps.velocity.mirror(j)], 1e-15);
        }
    }
}

TEST(Boundary, AbsorbingWallsAdmitNothing) {
    const PhaseSpace ps = space();
    std::mt19937_64 rng(2);
    WallTrace t = random_outgoing(ps, rng);
    apply_incoming_closure(t, BoundaryConfig::uniform(0.0, 0.0), ps.velocity);
    for (Wall w : kWalls)
        for (std::size_t j = 0; j < ps.nv(); ++j)
            if (!ps.velocity.is_outgoing(w, j)) {
                EXPECT_EQ(t.at(w)[j], 0.0);
            }
    EXPECT_GT(boundary_dissipation(t, ps.measure), 0.0);
}

TEST(Boundary, ConservativeWallsCarryNoMassFlux) {
    const PhaseSpace ps = space();
    std::mt19937_64 rng(3);
    for (auto [a, b] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {0.25, 0.75}}) {
        WallTrace t = random_outgoing(ps, rng);
        apply_incoming_closure(t, BoundaryConfig::uniform(a, b), ps.velocity);
        for (Wall w : kWalls) EXPECT_NEAR(wall_mass_flux(t, w, ps.measure), 0.0, 1e-15);
    }
}

TEST(Boundary, BothIdentityFormsMatchTheDissipation) {
    const PhaseSpace ps = space();
    std::mt19937_64 rng(4);
    for (auto [a, b] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}, {0.3, 0.3}, {0.0, 0.0}, {0.9, 0.05}}) {
        const BoundaryConfig cfg = BoundaryConfig::uniform(a, b);
        for (int k = 0; k < 20; ++k) {
            WallTrace t = random_outgoing(ps, rng);
            apply_incoming_closure(t, cfg, ps.velocity);
            const IdentityReport r = identity_residuals(t, cfg, ps, {0.0, 0.0}, {0.7, -0.2});
            EXPECT_LE(r.residual_defect_form, 1e-12);
            EXPECT_LE(r.residual_trace_form, 1e-12);
            EXPECT_LE(r.tangential_residual, 1e-12);
            EXPECT_NEAR(r.lhs, boundary_dissipation(t, ps.measure), 1e-14 * r.scale);
            EXPECT_GE(r.lhs, -1e-14 * r.scale);
            if (r.robin_applicable) {
                EXPECT_TRUE(r.robin_holds);
            }
        }
    }
}

TEST(Boundary, PreconditionsAndValidation) {
    const PhaseSpace ps = space();
    std::mt19937_64 rng(5);
    const BoundaryConfig cfg = BoundaryConfig::uniform(1.0, 0.0);
    WallTrace open = random_outgoing(ps, rng);
    EXPECT_THROW(identity_residuals(open, cfg, ps, {0.0, 0.0}, {0.0, 0.0}), ContractViolation);
    apply_incoming_closure(open, cfg, ps.velocity);
    EXPECT_THROW(identity_residuals(open, cfg, ps, {1.0, 0.0}, {0.0, 0.0}), ContractViolation);

    EXPECT_THROW(BoundaryConfig::uniform(0.6, 0.5).validate(), ConfigError);
    EXPECT_THROW(BoundaryConfig::uniform(-0.1, 0.5).validate(), ConfigError);
    EXPECT_NO_THROW(BoundaryConfig::uniform(0.4, 0.6).validate());
    EXPECT_TRUE(BoundaryConfig::uniform(0.4, 0.6).conservative());
    EXPECT_DOUBLE_EQ(BoundaryConfig::uniform(0.25, 0.25).robin(Wall::Left), 1.0);
    EXPECT_THROW(BoundaryConfig::uniform(0.0, 0.0).robin(Wall::Right), ContractViolation);
}
