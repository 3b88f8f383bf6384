#pragma once

// Scaled transport -eps^{-1}(v d_x - phi' d_v) in conservative upwind flux
// form, the IMEX step (explicit transport, implicit collision) and the
// simulation driver.
//
// Fluxes are taken against the weight e^{-phi} w_j so that the discrete
// generator has the measure dm as invariant measure: constants are stationary
// under a mass-conserving closure, mass is conserved to rounding, and an
// explicit step with dt * max_rate <= 1 is an L^2(dm) contraction.

#include <optional>
#include <string>
#include <vector>

#include "kinslab/boundary.hpp"
#include "kinslab/collision.hpp"
#include "kinslab/diagnostics.hpp"
#include "kinslab/fields.hpp"
#include "kinslab/grids.hpp"

namespace kinslab {

enum class InitialKind { Cosine, Bump, Shifted, Constant };

std::string to_string(InitialKind kind);
InitialKind parse_initial_kind(const std::string& name);

/// Cosine: 1 + a cos(pi x). Bump: exp(-((x - x0)/sigma)^2). Shifted:
/// 1 + a v cos(pi x). Constant: value.
struct InitialSpec {
    InitialKind kind = InitialKind::Cosine;
    double amplitude = 0.5;
    double center = 0.5;
    double width = 0.15;
    double value = 1.0;
};

/// True for the presets that depend on x only.
bool well_prepared(const InitialSpec& spec);
DistributionField make_initial(const InitialSpec& spec, const PhaseSpace& ps);

struct SimConfig {
    double epsilon = 1.0;
    CollisionKind collision = CollisionKind::Bgk;
    int nx = 64;
    int nv = 64;
    double vmax = 8.0;
    BoundaryConfig boundary;
    PotentialSpec potential;
    InitialSpec initial;
    double final_time = 5.0;
    double cfl = 0.5;               ///< theta
    double record_interval = 0.01;  ///< diagnostics cadence
    bool keep_snapshots = false;

    /// Throws ConfigError naming the offending key.
    void validate() const;
    PhaseSpace phase_space() const;
};

/// theta eps / (V_max/dx + L_phi/dv).
double stable_dt(const SimConfig& cfg, const PhaseSpace& ps);
double stable_dt(const SimConfig& cfg);

class TransportOperator {
public:
    TransportOperator(const PhaseSpace& ps, const BoundaryConfig& boundary, double epsilon);

    /// out = -eps^{-1}(v d_x f - phi' d_v f), incoming wall values from the closure.
    void apply(const DistributionField& f, DistributionField& out) const;
    DistributionField apply(const DistributionField& f) const;

    /// Largest outflow rate of any node; explicit Euler is positivity and
    /// L^2 preserving while dt * max_rate() <= 1.
    double max_rate() const { return max_rate_; }

private:
    const PhaseSpace* ps_;
    BoundaryConfig boundary_;
    double epsilon_;
    std::vector<double> face_weight_;   // e^{-phi} at the nx + 1 faces
    std::vector<double> force_;         // E_{i+1/2} - E_{i-1/2} per cell
    std::vector<double> velocity_flux_; // v_j w_j
    double max_rate_ = 0.0;
};

DistributionField transport_rhs(const DistributionField& f, const SimConfig& cfg, const PhaseSpace& ps);

/// Lie splitting: f* = f + dt T f, then (I - dt/eps^2 L) f_new = f*.
class ImexStepper {
public:
    ImexStepper(const PhaseSpace& ps, const SimConfig& cfg);

    /// Advances f in place by dt. ContractViolation if dt exceeds the
    /// positivity bound of the transport step.
    void step(DistributionField& f, double dt);
    const TransportOperator& transport() const { return transport_; }

private:
    TransportOperator transport_;
    CollisionSolver collision_;
    DistributionField rate_;
    double epsilon_;
};

DistributionField step_imex(const DistributionField& f, double dt, const SimConfig& cfg,
                            const PhaseSpace& ps);

/// Runs from the configured initial datum (or `initial` when given) to
/// final_time. Records land exactly on multiples of the cadence; the step is
/// the largest one no larger than the stable step that divides the cadence.
/// Throws NumericalError naming the step index on blow-up.
Trajectory run_simulation(const SimConfig& cfg);
Trajectory run_simulation(const SimConfig& cfg, const PhaseSpace& ps,
                          std::optional<DistributionField> initial = std::nullopt);

}  // namespace kinslab
