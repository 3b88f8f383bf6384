#pragma once

// Auxiliary macroscopic problem u - u'' + phi' u' = S on (0,1) with the Robin
// condition n u' + c_b u = 0, discretized in the weighted flux form
// e^{phi} (e^{-phi} u')' on the cell-centred mesh with ghost-value closure.
//
// Discrete norms: ||u||^2 = sum_i e^{-phi_i} dx u_i^2,
// ||grad u||^2 = sum over interior faces e^{-phi} dx g^2 plus the two
// half-cell wall gradients weighted by dx/2, ||sqrt(c_b) u||^2 = sum_wall
// e^{-phi(wall)} c_b u(wall)^2. With these the summation-by-parts identity
// (-L u, w) = (grad u, grad w) + sum_wall c_b u w e^{-phi} is exact.

#include <array>
#include <vector>

#include "kinslab/boundary.hpp"
#include "kinslab/fields.hpp"
#include "kinslab/grids.hpp"

namespace kinslab {

/// Wall data of the Robin problem. A Dirichlet wall is the c_b -> infinity limit.
struct RobinCoefficients {
    std::array<double, 2> cb{0.0, 0.0};
    std::array<bool, 2> dirichlet{false, false};

    static RobinCoefficients uniform(double cb);
    static RobinCoefficients homogeneous_dirichlet();
    /// c_b = (1 - alpha - beta)/(alpha + beta), Dirichlet on pure-absorbing walls.
    static RobinCoefficients from(const BoundaryConfig& cfg);
};

struct EllipticSolution {
    std::vector<double> u;                  ///< cell values
    std::vector<double> gradient;           ///< nx + 1 faces; entries 0 and nx are wall gradients
    std::vector<double> second_difference;  ///< per cell
    std::array<double, 2> wall_value{};     ///< u(0), u(1)
    std::array<double, 2> robin_residual{}; ///< |n u' + c_b u| per wall (|u| on Dirichlet walls)
    double norm_u = 0.0;
    double norm_gradient = 0.0;
    double norm_second = 0.0;
    double norm_boundary = 0.0;  ///< ||sqrt(c_b) u||_boundary
    double solve_residual = 0.0; ///< ||u - L u - S||
    RobinCoefficients coefficients;

    /// Cell-centre gradient: average of the two adjacent face gradients.
    double center_gradient(std::size_t i) const { return 0.5 * (gradient[i] + gradient[i + 1]); }
};

/// Direct tridiagonal solve. Throws NumericalError on a singular system or
/// non-finite data.
EllipticSolution solve_robin(const MacroField& source, const RobinCoefficients& coeffs,
                             const PhaseSpace& ps);
EllipticSolution solve_robin(const MacroField& source, const BoundaryConfig& cfg, const PhaseSpace& ps);

/// -L u = -(u'' - phi' u') in the discrete flux form, with the Robin closure.
MacroField apply_robin_operator(const MacroField& u, const RobinCoefficients& coeffs,
                                const PhaseSpace& ps);

/// (grad u, grad w) + sum_wall c_b u w e^{-phi}, the right side of summation by parts.
double robin_bilinear_form(const MacroField& u, const MacroField& w, const RobinCoefficients& coeffs,
                           const PhaseSpace& ps);

struct EntropyAux {
    EllipticSolution solution;
    MacroField source;  ///< <f> - M_c
    double a_quantity = 0.0;  ///< (S - u, S)
    double reference_mass = 0.0;  ///< M_c
};

/// M_c = M0 when both walls conserve mass, 0 otherwise; S = <f> - M_c.
/// `initial_mass_value` is M0; pass NaN to take it from f itself.
EntropyAux entropy_aux(const DistributionField& f, const BoundaryConfig& cfg, const PhaseSpace& ps,
                       double initial_mass_value);

struct EllipticInequalityReport {
    double norm_source = 0.0;
    double pairing = 0.0;            ///< (S - u, S)
    double regularity_sum = 0.0;     ///< ||u|| + ||grad u|| + ||D^2 u|| + ||sqrt(c_b) u||
    double regularity_ratio = 0.0;   ///< regularity_sum / ||S||
    double coercivity_ratio = 0.0;   ///< (||S|| + regularity_sum) / (S - u, S)^{1/2}
    double poincare_ratio = 0.0;     ///< ||u|| / (||grad u|| + ||sqrt(c_b) u||)
    double lower_bound_slack = 0.0;  ///< (S-u,S) - ||grad u||^2 - ||sqrt(c_b) u||^2, relative
    double energy_identity_residual = 0.0;  ///< relative residual of the exact energy identity
    bool holds = true;               ///< both exact relations within 1e-8 relative
};

EllipticInequalityReport elliptic_inequality_report(const MacroField& source,
                                                    const EllipticSolution& sol,
                                                    const PhaseSpace& ps);

}  // namespace kinslab
