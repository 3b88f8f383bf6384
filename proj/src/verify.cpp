#include "kinslab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "kinslab/asymptotics.hpp"
#include "kinslab/boundary.hpp"
#include "kinslab/collision.hpp"
#include "kinslab/elliptic.hpp"
#include "kinslab/errors.hpp"

namespace kinslab {

FaultMode parse_fault_mode(const std::string& name) {
    if (name.empty() || name == "none") return FaultMode::None;
    if (name == "flip-weight") return FaultMode::FlipWeight;
    throw ConfigError("--fault: unknown mode '" + name + "' (none|flip-weight)");
}

bool VerifyReport::passed() const { return failures() == 0; }

std::size_t VerifyReport::failures() const {
    return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const auto& c) { return !c.pass; }));
}

namespace {

constexpr double kPi = std::numbers::pi;

class Suite {
public:
    Suite(VerifyReport& report, std::string name) : report_(report), name_(std::move(name)) {}

    /// Passes when value <= tolerance.
    void at_most(const std::string& name, double value, double tolerance) {
        report_.cases.push_back({name_, name, value, tolerance, value <= tolerance});
    }
    /// Passes when value >= bound.
    void at_least(const std::string& name, double value, double bound) {
        report_.cases.push_back({name_, name, value, bound, value >= bound});
    }
    void within(const std::string& name, double value, double lo, double hi) {
        report_.cases.push_back({name_, name, value, hi, value >= lo && value <= hi});
    }

private:
    VerifyReport& report_;
    std::string name_;
};

DistributionField random_field(const PhaseSpace& ps, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DistributionField f(ps);
    for (double& x : f.values()) x = u(rng);
    return f;
}

double observed_order(double coarse_error, double fine_error) { return std::log2(coarse_error / fine_error); }

void grids_suite(VerifyReport& report) {
    Suite s(report, "grids");
    const VelocityGrid vg = build_velocity_grid(64, 8.0);
    s.at_most("normalization |Z-1| within declared tolerance", vg.normalization_error, vg.tolerance);
    s.at_most("second moment |<v^2>-1|", vg.second_moment_error, 1e-10);
    double odd = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < vg.size(); ++j) {
        odd += vg.weights[j] * vg.nodes[j];
        scale += vg.weights[j] * std::abs(vg.nodes[j]);
    }
    s.at_most("first moment vanishes", std::abs(odd) / scale, 1e-15);
}

void boundary_suite(VerifyReport& report, std::mt19937_64& rng, FaultMode fault) {
    Suite s(report, "boundary");
    PhaseSpace ps = build_phase_space(16, 64, 8.0, PotentialSpec{PotentialKind::Cosine, 0.5, {}, {}});
    if (fault == FaultMode::FlipWeight) {
        const std::size_t j = ps.nv() / 2;
        ps.measure.velocity[j] = -ps.measure.velocity[j];
    }
    const std::vector<std::pair<double, double>> configs{{1.0, 0.0}, {0.0, 1.0}, {0.5, 0.5}, {0.3, 0.3}, {0.0, 0.0}};
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (const auto& [alpha, beta] : configs) {
        const BoundaryConfig cfg = BoundaryConfig::uniform(alpha, beta);
        double worst = 0.0, worst_sign = 0.0, worst_flux = 0.0;
        bool robin = true;
        for (int draw = 0; draw < 40; ++draw) {
            WallTrace trace = WallTrace::zeros(ps.nv());
            for (Wall w : kWalls) {
                for (std::size_t j = 0; j < ps.nv(); ++j) {
                    if (ps.velocity.is_outgoing(w, j)) trace.at(w)[j] = u(rng);
                }
            }
            apply_incoming_closure(trace, cfg, ps.velocity);
            std::array<double, 2> rho{u(rng), u(rng)};
            const IdentityReport r = identity_residuals(trace, cfg, ps, {0.0, 0.0}, rho);
            worst = std::max(worst, r.max_residual());
            worst_sign = std::max(worst_sign, -r.lhs / r.scale);
            robin = robin && (!r.robin_applicable || r.robin_holds);
            if (cfg.conservative()) {
                for (Wall w : kWalls) {
                    worst_flux = std::max(worst_flux, std::abs(wall_mass_flux(trace, w, ps.measure)) / r.scale);
                }
            }
        }
        std::ostringstream tag;
        tag << "(alpha,beta)=(" << alpha << "," << beta << ")";
        s.at_most("identity residual " + tag.str(), worst, 1e-12);
        s.at_most("dissipation non-negative " + tag.str(), worst_sign, 1e-12);
        if (cfg.conservative()) s.at_most("zero wall mass flux " + tag.str(), worst_flux, 1e-13);
        if (!cfg.pure_absorbing(Wall::Left)) s.at_most("robin trace bound " + tag.str(), robin ? 0.0 : 1.0, 0.0);
    }
}

/// Weighted L2 error of the eigen-relation on |v| <= 4. The node set moves
/// with N_v, so a sup over nodes mixes in the growth of the error with |v|.
double eigen_error(int nv, bool quadratic) {
    const VelocityGrid vg = build_velocity_grid(nv, 8.0);
    DistributionField f(1, vg.size());
    for (std::size_t j = 0; j < vg.size(); ++j) {
        const double v = vg.nodes[j];
        f(0, j) = quadratic ? v * v - 1.0 : v;
    }
    const DistributionField lf = apply_fp(f, vg);
    double err = 0.0;
    for (std::size_t j = 0; j < vg.size(); ++j) {
        if (std::abs(vg.nodes[j]) > 4.0) continue;
        const double expected = quadratic ? -2.0 * f(0, j) : -f(0, j);
        const double d = lf(0, j) - expected;
        err += vg.weights[j] * d * d;
    }
    return std::sqrt(err / vg.normalizer);
}

void collision_suite(VerifyReport& report, std::mt19937_64& rng) {
    Suite s(report, "collision");
    const PhaseSpace ps = build_phase_space(8, 64, 8.0, PotentialSpec{});
    for (CollisionKind kind : {CollisionKind::Bgk, CollisionKind::FokkerPlanck}) {
        double moment = 0.0, positive = 0.0, residual = 0.0;
        for (int draw = 0; draw < 50; ++draw) {
            const DistributionField f = random_field(ps, rng);
            const DistributionField lf = apply_collision(f, kind, ps.velocity);
            for (double m : moment0(lf, ps.velocity).values) moment = std::max(moment, std::abs(m));
            const double n2 = norm_dm(f, ps.measure);
            positive = std::max(positive, inner_dm(lf, f, ps.measure) / (n2 * n2));
            const double nu = 10.0;
            const DistributionField g = implicit_collision_solve(f, nu, kind, ps.velocity);
            DistributionField res = apply_collision(g, kind, ps.velocity);
            for (std::size_t k = 0; k < res.size(); ++k) {
                res.values()[k] = g.values()[k] - nu * res.values()[k] - f.values()[k];
            }
            residual = std::max(residual, norm_dm(res, ps.measure) / n2);
        }
        const std::string tag = to_string(kind);
        s.at_most(tag + " mass conservation max|<Lf>|", moment, 1e-14);
        s.at_most(tag + " dissipativity max (Lf,f)/||f||^2", positive, 1e-14);
        s.at_most(tag + " implicit solve residual", residual, 1e-10);
    }
    for (bool quadratic : {false, true}) {
        const double e32 = eigen_error(32, quadratic), e64 = eigen_error(64, quadratic), e128 = eigen_error(128, quadratic);
        const double order = std::min(observed_order(e32, e64), observed_order(e64, e128));
        s.at_least(std::string("fp eigen-relation L2 order for ") + (quadratic ? "v^2-1" : "v"), order, 1.8);
    }
}

double manufactured_error(int nx) {
    const PhaseSpace ps = build_phase_space(nx, 8, 4.0, PotentialSpec{});
    MacroField source{std::vector<double>(ps.nx())};
    for (std::size_t i = 0; i < ps.nx(); ++i) {
        source.values[i] = (1.0 + kPi * kPi) * std::cos(kPi * ps.space.centers[i]);
    }
    const EllipticSolution sol = solve_robin(source, RobinCoefficients::uniform(0.0), ps);
    double err = 0.0;
    for (std::size_t i = 0; i < ps.nx(); ++i) {
        err = std::max(err, std::abs(sol.u[i] - std::cos(kPi * ps.space.centers[i])));
    }
    return err;
}

void elliptic_suite(VerifyReport& report, std::mt19937_64& rng) {
    Suite s(report, "elliptic");
    const double e32 = manufactured_error(32), e64 = manufactured_error(64), e128 = manufactured_error(128);
    s.within("manufactured order 32->64", observed_order(e32, e64), 1.8, 2.2);
    s.within("manufactured order 64->128", observed_order(e64, e128), 1.8, 2.2);

    const PhaseSpace ps = build_phase_space(64, 8, 4.0, PotentialSpec{PotentialKind::Cosine, 0.5, {}, {}});
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::vector<std::pair<std::string, RobinCoefficients>> walls{
        {"c_b=0", RobinCoefficients::uniform(0.0)},
        {"c_b=1", RobinCoefficients::uniform(1.0)},
        {"c_b=1e3", RobinCoefficients::uniform(1e3)},
        {"dirichlet", RobinCoefficients::homogeneous_dirichlet()}};
    for (const auto& [tag, coeffs] : walls) {
        double lower = 0.0, identity = 0.0, residual = 0.0;
        for (int draw = 0; draw < 100; ++draw) {
            MacroField source{std::vector<double>(ps.nx())};
            for (double& x : source.values) x = normal(rng);
            const EllipticSolution sol = solve_robin(source, coeffs, ps);
            const EllipticInequalityReport rep = elliptic_inequality_report(source, sol, ps);
            lower = std::max(lower, -rep.lower_bound_slack);
            identity = std::max(identity, rep.energy_identity_residual);
            residual = std::max(residual, sol.solve_residual / rep.norm_source);
        }
        s.at_most("lower bound (S-u,S) >= grad + boundary, " + tag, lower, 1e-8);
        s.at_most("energy identity, " + tag, identity, 1e-8);
        s.at_most("solve residual, " + tag, residual, 1e-10);
    }
}

void layer_suite(VerifyReport& report) {
    Suite s(report, "layer");
    const double eps = 0.2;
    const std::vector<double> times{0.25 * eps * eps, eps * eps, 2.0 * eps * eps, 3.0 * eps * eps};
    {
        const PhaseSpace ps = build_phase_space(4, 64, 8.0, PotentialSpec{});
        DistributionField psi(ps);
        for (std::size_t i = 0; i < ps.nx(); ++i) {
            for (std::size_t j = 0; j < ps.nv(); ++j) psi(i, j) = std::sin(1.0 + i + j * ps.velocity.nodes[j]);
        }
        const LayerTrajectory layer = solve_layer(psi, eps, CollisionKind::Bgk, times, ps.velocity);
        const double n0 = norm_dm(layer.psi.front(), ps.measure);
        double err = 0.0;
        for (std::size_t k = 0; k < layer.times.size(); ++k) {
            const double expected = std::exp(-layer.times[k] / (eps * eps)) * n0;
            err = std::max(err, std::abs(norm_dm(layer.psi[k], ps.measure) - expected) / n0);
        }
        s.at_most("bgk closed-form decay", err, 1e-14);
    }
    {
        const PhaseSpace ps = build_phase_space(4, 128, 8.0, PotentialSpec{});
        DistributionField psi(ps);
        for (std::size_t i = 0; i < ps.nx(); ++i) {
            for (std::size_t j = 0; j < ps.nv(); ++j) psi(i, j) = ps.velocity.nodes[j];
        }
        const LayerTrajectory layer = solve_layer(psi, eps, CollisionKind::FokkerPlanck, times, ps.velocity);
        const double n0 = norm_dm(layer.psi.front(), ps.measure);
        double err = 0.0;
        for (std::size_t k = 0; k < layer.times.size(); ++k) {
            const double expected = std::exp(-layer.times[k] / (eps * eps));
            err = std::max(err, std::abs(norm_dm(layer.psi[k], ps.measure) / n0 - expected) / expected);
        }
        s.at_most("fp eigenmode decay relative error", err, 1e-2);
    }
}

void parabolic_suite(VerifyReport& report) {
    Suite s(report, "parabolic");
    const PhaseSpace ps = build_phase_space(64, 8, 4.0, PotentialSpec{});
    MacroField rho{std::vector<double>(ps.nx())};
    for (std::size_t i = 0; i < ps.nx(); ++i) rho.values[i] = 1.0 + std::cos(kPi * ps.space.centers[i]);
    const std::vector<double> times{0.01, 0.05, 0.1};
    const ParabolicTrajectory traj = solve_parabolic(rho, ps, times);
    double err = 0.0, drift = 0.0, overshoot = 0.0;
    const double m0 = parabolic_mass(rho, ps.measure);
    const auto [lo, hi] = std::minmax_element(rho.values.begin(), rho.values.end());
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k];
        for (std::size_t i = 0; i < ps.nx(); ++i) {
            const double x = ps.space.centers[i];
            const double v = traj.density[k].values[i];
            err = std::max(err, std::abs(v - (1.0 + std::exp(-kPi * kPi * t) * std::cos(kPi * x))));
            overshoot = std::max({overshoot, v - *hi, *lo - v});
        }
        drift = std::max(drift, std::abs(parabolic_mass(traj.density[k], ps.measure) - m0) / m0);
    }
    s.at_most("separation-of-variables oracle max error", err, 1e-3);
    s.at_most("mass conservation", drift, 1e-10);
    s.at_most("maximum principle overshoot", overshoot, 1e-10);
}

}  // namespace

VerifyReport cmd_verify(std::uint64_t seed, FaultMode fault) {
    VerifyReport report;
    std::mt19937_64 rng(seed);
    grids_suite(report);
    boundary_suite(report, rng, fault);
    collision_suite(report, rng);
    elliptic_suite(report, rng);
    layer_suite(report);
    parabolic_suite(report);
    return report;
}

void print_report(std::ostream& out, const VerifyReport& report) {
    out << std::setprecision(3) << std::scientific;
    for (const auto& c : report.cases) {
        out << (c.pass ? "[PASS] " : "[FAIL] ") << c.suite << ": " << c.name << "  value=" << c.value
            << "  bound=" << c.tolerance << '\n';
    }
    out << std::defaultfloat << report.cases.size() - report.failures() << '/' << report.cases.size()
        << " cases passed\n";
}

}  // namespace kinslab
