#pragma once

#include <vector>

#include "kinslab/collision.hpp"
#include "kinslab/fields.hpp"
#include "kinslab/grids.hpp"

namespace kinslab {

/// Samples of rho solving rho_t = rho'' - phi' rho' with zero flux at both walls.
struct ParabolicTrajectory {
    std::vector<double> times;
    std::vector<MacroField> density;
    double dt = 0.0;  ///< largest sub-step used
    double dx = 0.0;
    std::size_t steps = 0;

    /// Linear interpolation in t; exact at sample times.
    MacroField at(double t) const;
};

/// Crank-Nicolson in the weighted flux form e^{phi}(e^{-phi} rho')'. Sub-steps
/// never exceed dx^2 (which keeps the scheme monotone for phi = 0) and land
/// exactly on every requested sample time. `sample_times` must be increasing
/// and start at or after 0; t = 0 is always included.
ParabolicTrajectory solve_parabolic(const MacroField& rho_in, const PhaseSpace& ps,
                                    const std::vector<double>& sample_times);

/// Mass sum_i e^{-phi_i} dx rho_i.
double parabolic_mass(const MacroField& rho, const MeasureWeights& m);

/// psi_t = eps^{-2} L psi, independently in every cell.
struct LayerTrajectory {
    CollisionKind kind = CollisionKind::Bgk;
    double epsilon = 1.0;
    std::vector<double> times;
    std::vector<DistributionField> psi;
    double substep = 0.0;  ///< backward Euler step for Fokker-Planck, 0 for BGK
};

/// The mean of psi_in is removed per cell first; a residual mean above
/// rounding throws ContractViolation. BGK uses e^{-t/eps^2} psi_in exactly,
/// Fokker-Planck uses backward Euler with step at most
/// substep_fraction * eps^2, landing on every sample time.
LayerTrajectory solve_layer(const DistributionField& psi_in, double epsilon, CollisionKind kind,
                            const std::vector<double>& times, const VelocityGrid& vgrid,
                            double substep_fraction = 1e-3);

/// ||(1 + |v|) psi||.
double weighted_norm(const DistributionField& psi, const PhaseSpace& ps);

struct LayerLedger {
    double lhs = 0.0;  ///< ||psi(T)||^2 + (2/eps^2) int ||psi||^2 (trapezoid)
    double rhs = 0.0;  ///< ||psi_in||^2
    bool holds = false;  ///< lhs <= rhs (1 + 1e-3)
};

LayerLedger layer_ledger(const LayerTrajectory& layer, const PhaseSpace& ps);

/// T_eps = eps^2 |log sqrt(eps)|.
double layer_time(double epsilon);

struct DiffusionGap {
    double l2_time = 0.0;         ///< (int_0^T ||f - rho||^2 dt)^{1/2}
    double sup_all = 0.0;         ///< sup_t ||f - rho||
    double sup_after_layer = 0.0; ///< sup_{t >= T_eps} ||f - rho||
    double sup_with_layer = 0.0;  ///< sup_t ||f - rho - psi||; equals sup_all without a layer
    double t_eps = 0.0;
    bool layer_used = false;
    bool interpolated = false;    ///< rho was interpolated onto kinetic sample times
    std::size_t samples = 0;
};

/// Kinetic samples carry their own times. A layer, when given, must share them.
DiffusionGap diffusion_gap(const std::vector<DistributionField>& kinetic,
                           const ParabolicTrajectory& parabolic, const LayerTrajectory* layer,
                           double epsilon, const PhaseSpace& ps);

/// Cell-pair average of a field on 2 nx cells onto nx cells, weighted by the
/// fine measure.
DistributionField restrict_to_coarse(const DistributionField& fine, const MeasureWeights& fine_measure);

/// 2 fine - coarse, the first-order Richardson combination (both on the coarse mesh).
DistributionField richardson(const DistributionField& fine_restricted, const DistributionField& coarse);

}  // namespace kinslab
