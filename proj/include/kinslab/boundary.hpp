#pragma once

// Maxwell wall closure f = alpha D f + beta R f on the incoming half, with the
// remaining fraction 1 - alpha - beta absorbed, and the discrete boundary
// functionals built on it.

#include <array>
#include <string>

#include "kinslab/fields.hpp"
#include "kinslab/grids.hpp"

namespace kinslab {

struct WallCoefficients {
    double alpha = 1.0;  ///< diffuse fraction
    double beta = 0.0;   ///< specular fraction
};

struct BoundaryConfig {
    std::array<WallCoefficients, 2> walls{};
    double iota = 1e-8;  ///< below this accommodation a wall counts as pure-absorbing

    static BoundaryConfig uniform(double alpha, double beta, double iota = 1e-8);

    const WallCoefficients& at(Wall w) const { return walls[wall_index(w)]; }
    double accommodation(Wall w) const { return at(w).alpha + at(w).beta; }
    bool pure_absorbing(Wall w) const { return accommodation(w) < iota; }
    /// alpha + beta == 1 up to rounding: no mass leaves through this wall.
    bool mass_conserving(Wall w) const;
    /// c_b = (1 - s)/s, exactly 0 on mass-conserving walls. Throws
    /// ContractViolation on pure-absorbing walls, where c_b is undefined.
    double robin(Wall w) const;
    /// Both walls conserve mass.
    bool conservative() const { return mass_conserving(Wall::Left) && mass_conserving(Wall::Right); }

    /// Throws ConfigError if alpha, beta leave [0,1] or alpha + beta > 1.
    void validate() const;
};

/// Velocity traces on both walls. Outgoing entries come from the adjacent
/// cells (first-order upwind extrapolation), incoming ones from the closure.
struct WallTrace {
    WallValues values;

    static WallTrace zeros(std::size_t nv);
    std::vector<double>& at(Wall w) { return values[wall_index(w)]; }
    const std::vector<double>& at(Wall w) const { return values[wall_index(w)]; }
};

/// Copies the outgoing half of each wall from the adjacent cell; incoming left at 0.
WallTrace outgoing_trace(const DistributionField& f, const VelocityGrid& vgrid);

/// D f = (sum_out w_j |v_j| f_j) / S_out, i.e. c_w = 1 / S_out so D 1 = 1 exactly.
double diffuse_value(const WallTrace& trace, Wall w, const VelocityGrid& vgrid);

/// Fills the incoming half: f_j = alpha D + beta f_{mirror(j)}.
WallTrace incoming_closure(const WallTrace& trace, const BoundaryConfig& cfg,
                           const VelocityGrid& vgrid);
void apply_incoming_closure(WallTrace& trace, const BoundaryConfig& cfg, const VelocityGrid& vgrid);

/// Closed trace of a field: outgoing_trace followed by the closure.
WallTrace closed_trace(const DistributionField& f, const BoundaryConfig& cfg,
                       const VelocityGrid& vgrid);

/// (f^2, n.v)_boundary on a closed trace.
double boundary_dissipation(const WallTrace& trace, const MeasureWeights& measure);

/// Net mass flux sum_j b_j (n.v_j) f_j through one wall.
double wall_mass_flux(const WallTrace& trace, Wall w, const MeasureWeights& measure);

struct IdentityReport {
    double lhs = 0.0;              ///< (f^2, n.v)_boundary
    double rhs_defect_form = 0.0;  ///< (1-beta^2)(f-Df)^2 + (1-(alpha+beta)^2)(Df)^2 against (n.v)_+
    double rhs_trace_form = 0.0;   ///< (alpha^2+2 alpha beta)(f-Df)^2 + (1-(alpha+beta)^2) f^2
    double scale = 0.0;            ///< (f^2, |n.v|)_boundary, the natural magnitude
    double residual_defect_form = 0.0;  ///< relative to scale
    double residual_trace_form = 0.0;
    double tangential_lhs = 0.0;   ///< (v.U f, n.v)_boundary
    double tangential_rhs = 0.0;   ///< (v.U [(1-beta) f - alpha D f], (n.v)_+)_boundary
    double tangential_residual = 0.0;
    bool robin_applicable = false;  ///< false when a wall is pure-absorbing
    double robin_lhs = 0.0;        ///< |(v.(U - c_b rho n) f, n.v)_boundary|
    double robin_weight = 0.0;     ///< ||U - c_b rho n|| + ||sqrt(c_b) rho||
    double robin_constant = 0.0;   ///< explicit constant of the trace bound
    double robin_bound = 0.0;      ///< robin_constant * robin_weight * lhs^{1/2}
    bool robin_holds = true;

    double max_residual() const;
};

/// Evaluates both forms of the boundary identity for (f^2, n.v), the
/// tangential identity, and the Robin trace bound. The trace must already be
/// closed (ContractViolation otherwise). In one dimension a tangential U is
/// necessarily zero; a non-zero entry is rejected.
IdentityReport identity_residuals(const WallTrace& trace, const BoundaryConfig& cfg,
                                  const PhaseSpace& ps, std::array<double, 2> tangential,
                                  std::array<double, 2> rho);

}  // namespace kinslab
