#include "kinslab/collision.hpp"

#include <cmath>

#include "kinslab/errors.hpp"

namespace kinslab {

std::string to_string(CollisionKind kind) {
    return kind == CollisionKind::Bgk ? "bgk" : "fp";
}

CollisionKind parse_collision_kind(const std::string& name) {
    if (name == "bgk") return CollisionKind::Bgk;
    if (name == "fp" || name == "fokker-planck" || name == "fokker_planck") {
        return CollisionKind::FokkerPlanck;
    }
    throw ConfigError("model.collision: unknown operator '" + name + "' (expected bgk or fp)");
}

namespace {

void check_velocity(const DistributionField& f, const VelocityGrid& vgrid, const char* where) {
    if (f.nv() != vgrid.size()) {
        throw ContractViolation(std::string(where) + ": velocity size mismatch");
    }
}

}  // namespace

DistributionField apply_bgk(const DistributionField& f, const VelocityGrid& vgrid) {
    check_velocity(f, vgrid, "apply_bgk");
    DistributionField out(f.nx(), f.nv());
    out.set_time(f.time());
    for (std::size_t i = 0; i < f.nx(); ++i) {
        const auto fi = f.cell(i);
        double mean = 0.0;
        for (std::size_t j = 0; j < f.nv(); ++j) mean += vgrid.weights[j] * fi[j];
        mean /= vgrid.normalizer;
        auto oi = out.cell(i);
        for (std::size_t j = 0; j < f.nv(); ++j) oi[j] = mean - fi[j];
    }
    return out;
}

DistributionField apply_fp(const DistributionField& f, const VelocityGrid& vgrid) {
    check_velocity(f, vgrid, "apply_fp");
    const std::size_t nv = f.nv();
    DistributionField out(f.nx(), nv);
    out.set_time(f.time());
    for (std::size_t i = 0; i < f.nx(); ++i) {
        const auto fi = f.cell(i);
        auto oi = out.cell(i);
        double flux_below = 0.0;
        for (std::size_t j = 0; j < nv; ++j) {
            const double flux_above =
                j + 1 < nv ? vgrid.face_density[j] * (fi[j + 1] - fi[j]) / vgrid.dv : 0.0;
            oi[j] = (flux_above - flux_below) / vgrid.weights[j];
            flux_below = flux_above;
        }
    }
    return out;
}

DistributionField apply_collision(const DistributionField& f, CollisionKind kind,
                                  const VelocityGrid& vgrid) {
    return kind == CollisionKind::Bgk ? apply_bgk(f, vgrid) : apply_fp(f, vgrid);
}

CollisionSolver::CollisionSolver(const VelocityGrid& vgrid, CollisionKind kind)
    : vgrid_(&vgrid), kind_(kind), thomas_(vgrid.size()) {
    const std::size_t n = vgrid.size();
    lower_.resize(n);
    diag_.resize(n);
    upper_.resize(n);
    rhs_.resize(n);
    out_.resize(n);
}

void CollisionSolver::solve_cell(std::span<double> f, double nu) {
    const VelocityGrid& vg = *vgrid_;
    const std::size_t n = vg.size();
    if (kind_ == CollisionKind::Bgk) {
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += vg.weights[j] * f[j];
        mean /= vg.normalizer;
        const double shrink = 1.0 / (1.0 + nu);
        for (std::size_t j = 0; j < n; ++j) f[j] = mean + (f[j] - mean) * shrink;
        return;
    }
    // Symmetric form: w_j g_j - nu (F_{j+1/2} - F_{j-1/2}) = w_j f_j.
    for (std::size_t j = 0; j < n; ++j) {
        const double a_below = j > 0 ? nu * vg.face_density[j - 1] / vg.dv : 0.0;
        const double a_above = j + 1 < n ? nu * vg.face_density[j] / vg.dv : 0.0;
        lower_[j] = -a_below;
        upper_[j] = -a_above;
        diag_[j] = vg.weights[j] + a_below + a_above;
        rhs_[j] = vg.weights[j] * f[j];
    }
    thomas_.solve(lower_, diag_, upper_, rhs_, out_);
    for (std::size_t j = 0; j < n; ++j) f[j] = out_[j];
}

void CollisionSolver::solve(DistributionField& f, double nu) {
    for (std::size_t i = 0; i < f.nx(); ++i) solve_cell(f.cell(i), nu);
}

DistributionField implicit_collision_solve(const DistributionField& f, double nu,
                                           CollisionKind kind, const VelocityGrid& vgrid) {
    check_velocity(f, vgrid, "implicit_collision_solve");
    if (!(nu > 0.0)) throw ContractViolation("implicit_collision_solve: nu must be positive");
    if (!f.all_finite()) throw NumericalError("implicit_collision_solve: non-finite input");
    DistributionField g = f;
    CollisionSolver solver(vgrid, kind);
    solver.solve(g, nu);
    if (!g.all_finite()) throw NumericalError("implicit_collision_solve: non-finite result");
    return g;
}

}  // namespace kinslab
