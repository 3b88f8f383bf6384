#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "kinslab/errors.hpp"
#include "kinslab/fields.hpp"

using namespace kinslab;

namespace {

PhaseSpace small_space() { return build_phase_space(8, 16, 8.0, PotentialSpec{PotentialKind::Linear, 0.7, {}, {}}); }

DistributionField random_field(const PhaseSpace& ps, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    DistributionField f(ps);
    for (double& x : f.values()) x = n(rng);
    return f;
}

}  // namespace

TEST(Fields, LiftAndMomentAreInverse) {
    const PhaseSpace ps = small_space();
    MacroField rho{std::vector<double>(ps.nx())};
    for (std::size_t i = 0; i < ps.nx(); ++i) rho.values[i] = std::sin(1.0 + i);
    const MacroField back = moment0(lift(rho, ps.nv()), ps.velocity);
    for (std::size_t i = 0; i < ps.nx(); ++i) EXPECT_NEAR(back.values[i], rho.values[i], 1e-15);
    const MacroField flux = moment1(lift(rho, ps.nv()), ps.velocity);
    for (double x : flux.values) EXPECT_NEAR(x, 0.0, 1e-16);
}

TEST(Fields, PerpIsOrthogonalToMacroscopicFunctions) {
    const PhaseSpace ps = small_space();
    const DistributionField f = random_field(ps, 3);
    const DistributionField p = perp(f, ps.velocity);
    for (double m : moment0(p, ps.velocity).values) EXPECT_NEAR(m, 0.0, 1e-15);
    const DistributionField mean = lift(moment0(f, ps.velocity), ps.nv());
    EXPECT_NEAR(inner_dm(p, mean, ps.measure), 0.0, 1e-15);
    const double pn = norm_dm(p, ps.measure);
    EXPECT_NEAR(perp_norm_squared(f, ps), pn * pn, 1e-14);
    // Pythagoras: ||f||^2 = ||<f>||^2 + ||f_perp||^2.
    const double fn = norm_dm(f, ps.measure), mn = norm_dm(mean, ps.measure);
    EXPECT_NEAR(fn * fn, mn * mn + pn * pn, 1e-13);
}

TEST(Fields, MassOfAConstantIsTheDomainWeight) {
    const PhaseSpace ps = small_space();
    const DistributionField f(ps, 2.5);
    EXPECT_NEAR(total_mass(f, ps.measure), 2.5 * ps.measure.domain_weight(), 1e-14);
    EXPECT_NEAR(initial_mass(f, ps.measure), 2.5, 1e-14);
    EXPECT_NEAR(norm_x(MacroField{std::vector<double>(ps.nx(), 2.5)}, ps.measure),
                norm_dm(f, ps.measure), 1e-14);
}

TEST(Fields, SnapshotRoundTripIsExact) {
    const PhaseSpace ps = small_space();
    DistributionField f = random_field(ps, 11);
    f.set_time(0.125);
    std::stringstream buffer;
    write_snapshot(buffer, f, 8.0);
    const Snapshot s = read_snapshot(buffer);
    EXPECT_DOUBLE_EQ(s.vmax, 8.0);
    EXPECT_DOUBLE_EQ(s.field.time(), 0.125);
    ASSERT_TRUE(s.field.same_shape(f));
    EXPECT_EQ(s.field.values(), f.values());
}

TEST(Fields, ShapeMismatchIsAContractViolation) {
    const PhaseSpace ps = small_space();
    const DistributionField wrong(ps.nx() + 1, ps.nv());
    EXPECT_THROW(require_shape(wrong, ps, "test"), ContractViolation);
}

TEST(Fields, FiniteCheck) {
    DistributionField f(2, 8, 1.0);
    EXPECT_TRUE(f.all_finite());
    f(1, 3) = std::nan("");
    EXPECT_FALSE(f.all_finite());
}
