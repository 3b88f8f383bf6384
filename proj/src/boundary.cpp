#include "kinslab/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "kinslab/errors.hpp"

namespace kinslab {

namespace {

constexpr double kUnitTolerance = 1e-12;

// Visits the outgoing velocities of a wall from the slowest to the fastest, so
// both walls accumulate symmetric sums in the same order.
template <typename Fn>
void for_each_outgoing(Wall w, std::size_t nv, Fn&& fn) {
    const std::size_t half = nv / 2;
    for (std::size_t k = 0; k < half; ++k) {
        fn(w == Wall::Left ? half - 1 - k : half + k);
    }
}

template <typename Fn>
void for_each_incoming(Wall w, std::size_t nv, Fn&& fn) {
    for_each_outgoing(w == Wall::Left ? Wall::Right : Wall::Left, nv, fn);
}

void check_trace(const WallTrace& trace, std::size_t nv, const char* where) {
    for (Wall w : kWalls) {
        if (trace.at(w).size() != nv) {
            throw ContractViolation(std::string(where) + ": trace length does not match the velocity grid");
        }
    }
}

}  // namespace

BoundaryConfig BoundaryConfig::uniform(double alpha, double beta, double iota) {
    BoundaryConfig cfg;
    cfg.walls = {WallCoefficients{alpha, beta}, WallCoefficients{alpha, beta}};
    cfg.iota = iota;
    return cfg;
}

bool BoundaryConfig::mass_conserving(Wall w) const {
    return std::abs(1.0 - accommodation(w)) <= kUnitTolerance;
}

double BoundaryConfig::robin(Wall w) const {
    if (pure_absorbing(w)) {
        throw ContractViolation(std::string("robin coefficient undefined on pure-absorbing ") +
                                wall_name(w) + " wall");
    }
    if (mass_conserving(w)) return 0.0;
    const double s = accommodation(w);
    return (1.0 - s) / s;
}

void BoundaryConfig::validate() const {
    for (Wall w : kWalls) {
        const auto& c = at(w);
        const std::string prefix = std::string("boundary.") + wall_name(w);
        if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw ConfigError(prefix + ": alpha must lie in [0,1]");
        if (!(c.beta >= 0.0 && c.beta <= 1.0)) throw ConfigError(prefix + ": beta must lie in [0,1]");
        if (c.alpha + c.beta > 1.0 + kUnitTolerance) {
            throw ConfigError(prefix + ": alpha + beta <= 1 violated (alpha=" + std::to_string(c.alpha) +
                              ", beta=" + std::to_string(c.beta) + ")");
        }
    }
    if (!(iota > 0.0 && iota < 1.0)) throw ConfigError("boundary.iota must lie in (0,1)");
}

WallTrace WallTrace::zeros(std::size_t nv) {
    WallTrace t;
    t.values = {std::vector<double>(nv, 0.0), std::vector<double>(nv, 0.0)};
    return t;
}

WallTrace outgoing_trace(const DistributionField& f, const VelocityGrid& vgrid) {
    if (f.nv() != vgrid.size() || f.nx() == 0) {
        throw ContractViolation("outgoing_trace: shape mismatch");
    }
    WallTrace trace = WallTrace::zeros(f.nv());
    const auto first = f.cell(0);
    const auto last = f.cell(f.nx() - 1);
    for_each_outgoing(Wall::Left, f.nv(), [&](std::size_t j) { trace.at(Wall::Left)[j] = first[j]; });
    for_each_outgoing(Wall::Right, f.nv(), [&](std::size_t j) { trace.at(Wall::Right)[j] = last[j]; });
    return trace;
}

double diffuse_value(const WallTrace& trace, Wall w, const VelocityGrid& vgrid) {
    check_trace(trace, vgrid.size(), "diffuse_value");
    const auto& values = trace.at(w);
    double flux = 0.0, norm = 0.0;
    for_each_outgoing(w, vgrid.size(), [&](std::size_t j) {
        const double weight = vgrid.weights[j] * std::abs(vgrid.nodes[j]);
        flux += weight * values[j];
        norm += weight;
    });
    return flux / norm;
}

void apply_incoming_closure(WallTrace& trace, const BoundaryConfig& cfg, const VelocityGrid& vgrid) {
    check_trace(trace, vgrid.size(), "incoming_closure");
    cfg.validate();
    for (Wall w : kWalls) {
        const auto [alpha, beta] = cfg.at(w);
        const double diffuse = diffuse_value(trace, w, vgrid);
        auto& values = trace.at(w);
        for_each_incoming(w, vgrid.size(), [&](std::size_t j) {
            values[j] = alpha * diffuse + beta * values[vgrid.mirror(j)];
        });
    }
}

WallTrace incoming_closure(const WallTrace& trace, const BoundaryConfig& cfg,
                           const VelocityGrid& vgrid) {
    WallTrace closed = trace;
    apply_incoming_closure(closed, cfg, vgrid);
    return closed;
}

WallTrace closed_trace(const DistributionField& f, const BoundaryConfig& cfg,
                       const VelocityGrid& vgrid) {
    WallTrace trace = outgoing_trace(f, vgrid);
    apply_incoming_closure(trace, cfg, vgrid);
    return trace;
}

double boundary_dissipation(const WallTrace& trace, const MeasureWeights& measure) {
    return inner_boundary(trace.values, trace.values, normal_velocity, measure);
}

double wall_mass_flux(const WallTrace& trace, Wall w, const MeasureWeights& measure) {
    const auto& values = trace.at(w);
    double s = 0.0;
    for (std::size_t j = 0; j < measure.nv(); ++j) {
        s += measure.velocity[j] * normal_velocity(w, measure.velocity_nodes[j]) * values[j];
    }
    return measure.wall[wall_index(w)] * s;
}

double IdentityReport::max_residual() const {
    return std::max({residual_defect_form, residual_trace_form, tangential_residual});
}

IdentityReport identity_residuals(const WallTrace& trace, const BoundaryConfig& cfg,
                                  const PhaseSpace& ps, std::array<double, 2> tangential,
                                  std::array<double, 2> rho) {
    const VelocityGrid& vg = ps.velocity;
    const MeasureWeights& m = ps.measure;
    check_trace(trace, vg.size(), "identity_residuals");
    for (double u : tangential) {
        if (u != 0.0) {
            throw ContractViolation("identity_residuals: a tangential vector on a 1D wall must vanish");
        }
    }
    const WallTrace expected = incoming_closure(trace, cfg, vg);
    double magnitude = 0.0, mismatch = 0.0;
    for (Wall w : kWalls) {
        for (std::size_t j = 0; j < vg.size(); ++j) {
            magnitude = std::max(magnitude, std::abs(trace.at(w)[j]));
            mismatch = std::max(mismatch, std::abs(trace.at(w)[j] - expected.at(w)[j]));
        }
    }
    if (mismatch > 1e-12 * (1.0 + magnitude)) {
        throw ContractViolation("identity_residuals: trace does not satisfy the boundary closure");
    }

    IdentityReport r;
    r.lhs = boundary_dissipation(trace, m);
    r.scale = inner_boundary(trace.values, trace.values,
                             [](Wall, double v) { return std::abs(v); }, m);

    r.robin_applicable = !cfg.pure_absorbing(Wall::Left) && !cfg.pure_absorbing(Wall::Right);
    double robin_lhs = 0.0, robin_weight_sq = 0.0, tangential_weight_sq = 0.0;
    for (Wall w : kWalls) {
        const auto [alpha, beta] = cfg.at(w);
        const double s = alpha + beta;
        const auto& f = trace.at(w);
        const double d = diffuse_value(trace, w, vg);
        const double wall_weight = m.wall[wall_index(w)];
        double defect_form = 0.0, trace_form = 0.0, tang_rhs = 0.0;
        double sum_v = 0.0, sum_v2 = 0.0, sum_v3 = 0.0;
        for_each_outgoing(w, vg.size(), [&](std::size_t j) {
            const double speed = std::abs(vg.nodes[j]);
            const double b = m.velocity[j] * speed;
            const double defect = f[j] - d;
            defect_form += b * ((1.0 - beta * beta) * defect * defect + (1.0 - s * s) * d * d);
            trace_form += b * ((alpha * alpha + 2.0 * alpha * beta) * defect * defect +
                               (1.0 - s * s) * f[j] * f[j]);
            tang_rhs += b * vg.nodes[j] * tangential[wall_index(w)] * ((1.0 - beta) * f[j] - alpha * d);
            sum_v += vg.weights[j] * speed;
            sum_v2 += vg.weights[j] * speed * speed;
            sum_v3 += vg.weights[j] * speed * speed * speed;
        });
        r.rhs_defect_form += wall_weight * defect_form;
        r.rhs_trace_form += wall_weight * trace_form;
        r.tangential_rhs += wall_weight * tang_rhs;
        double tang_lhs = 0.0;
        for (std::size_t j = 0; j < vg.size(); ++j) {
            tang_lhs += m.velocity[j] * vg.nodes[j] * tangential[wall_index(w)] * f[j] *
                        normal_velocity(w, vg.nodes[j]);
        }
        r.tangential_lhs += wall_weight * tang_lhs;
        tangential_weight_sq += wall_weight * tangential[wall_index(w)] * tangential[wall_index(w)];

        if (r.robin_applicable) {
            const double cb = cfg.robin(w);
            const double q = rho[wall_index(w)];
            // v.(U - c_b rho n) (n.v) = -c_b rho (n.v)^2 since U = 0 and |n| = 1.
            double pairing = 0.0;
            for (std::size_t j = 0; j < vg.size(); ++j) {
                pairing += m.velocity[j] * vg.nodes[j] * vg.nodes[j] * f[j];
            }
            robin_lhs += wall_weight * cb * q * pairing;
            robin_weight_sq += wall_weight * cb * q * q;
            tangential_weight_sq += wall_weight * cb * cb * q * q;
            // Splitting (1+beta) f + alpha D f = (1+beta)(f - Df) + (1+s) Df on the
            // outgoing half and bounding each piece by its term in the defect form.
            const double k1 = 2.0 * std::sqrt(sum_v3 / s);
            const double k2 = sum_v2 * std::sqrt((1.0 + s) / (s * sum_v));
            r.robin_constant = std::max(r.robin_constant,
                                        std::sqrt(2.0) * std::max(k1, k2) / std::sqrt(vg.normalizer));
        }
    }
    const double scale = r.scale > 0.0 ? r.scale : 1.0;
    r.residual_defect_form = std::abs(r.lhs - r.rhs_defect_form) / scale;
    r.residual_trace_form = std::abs(r.lhs - r.rhs_trace_form) / scale;
    r.tangential_residual = std::abs(r.tangential_lhs - r.tangential_rhs) / scale;
    if (r.robin_applicable) {
        r.robin_lhs = std::abs(robin_lhs);
        r.robin_weight = std::sqrt(tangential_weight_sq) + std::sqrt(robin_weight_sq);
        r.robin_bound = r.robin_constant * r.robin_weight * std::sqrt(std::max(0.0, r.lhs));
        r.robin_holds = r.robin_lhs <= r.robin_bound * (1.0 + 1e-12) + 1e-14 * scale;
    }
    return r;
}

}  // namespace kinslab
