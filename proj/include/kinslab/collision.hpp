#pragma once

#include <span>
#include <string>
#include <vector>

#include "kinslab/fields.hpp"
#include "kinslab/grids.hpp"
#include "kinslab/tridiagonal.hpp"

namespace kinslab {

enum class CollisionKind { Bgk, FokkerPlanck };

std::string to_string(CollisionKind kind);
CollisionKind parse_collision_kind(const std::string& name);

/// Relaxation operator <f> - f, cell by cell.
DistributionField apply_bgk(const DistributionField& f, const VelocityGrid& vgrid);

/// Fokker-Planck operator in divergence form mu^{-1} d_v(mu d_v f) with face
/// fluxes mu(v_{j+1/2}) (f_{j+1} - f_j)/dv and zero flux past +-V_max.
DistributionField apply_fp(const DistributionField& f, const VelocityGrid& vgrid);

DistributionField apply_collision(const DistributionField& f, CollisionKind kind,
                                  const VelocityGrid& vgrid);

/// Solves (I - nu L) g = f independently in every cell; mass <g> = <f>.
/// Reuses its tridiagonal workspace between calls, so one instance per thread.
class CollisionSolver {
public:
    CollisionSolver(const VelocityGrid& vgrid, CollisionKind kind);

    void solve_cell(std::span<double> f, double nu);
    void solve(DistributionField& f, double nu);

    CollisionKind kind() const { return kind_; }

private:
    const VelocityGrid* vgrid_;
    CollisionKind kind_;
    TridiagonalSolver thomas_;
    std::vector<double> lower_, diag_, upper_, rhs_, out_;
};

/// Throws NumericalError on non-finite input, ContractViolation if nu <= 0.
DistributionField implicit_collision_solve(const DistributionField& f, double nu,
                                           CollisionKind kind, const VelocityGrid& vgrid);

}  // namespace kinslab
