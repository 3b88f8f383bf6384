#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kinslab/boundary.hpp"
#include "kinslab/elliptic.hpp"
#include "kinslab/fields.hpp"

namespace kinslab {

/// One time sample of a run. The CSV carries the first nine members in this
/// order; norm_f is kept in memory for the dissipation ledger.
struct DiagnosticsRecord {
    double t = 0.0;
    double norm_f_minus_mc = 0.0;
    double norm_fperp = 0.0;
    double mass = 0.0;                  ///< int f dm
    double boundary_dissipation = 0.0;  ///< (f^2, n.v)_boundary
    double a_quantity = 0.0;
    double entropy = 0.0;               ///< E = ||f - M_c||^2 + kappa eps (v u', f_perp)
    double int_fperp2 = 0.0;            ///< int_0^t ||f_perp||^2
    double int_boundary = 0.0;          ///< int_0^t (f^2, n.v)_boundary
    double norm_f = 0.0;
};

inline constexpr const char* kDiagnosticsColumns =
    "t,norm_f_minus_Mc,norm_fperp,mass,boundary_dissipation,A_quantity,entropy_E,int_fperp2,int_boundary";

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& in);

/// (v u', f_perp) with u' averaged to cell centres.
double entropy_cross_term(const DistributionField& f, const EllipticSolution& u, const PhaseSpace& ps);

/// ||f - M_c||^2 + kappa eps (v u', f_perp).
double modified_entropy(const DistributionField& f, const EllipticSolution& u, double kappa,
                        double epsilon, double reference_mass, const PhaseSpace& ps);

/// kappa = min(0.1, ||f - M_c||^2 / (2 eps |(v u', f_perp)|)), evaluated once on the
/// initial datum, which keeps |E - ||f - M_c||^2| <= ||f - M_c||^2 / 2 there.
double adaptive_kappa(double distance_squared, double cross_term, double epsilon);

/// ||f - M_c||^2 from f without allocating f - M_c.
double distance_squared(const DistributionField& f, double reference_mass, const MeasureWeights& m);

/// Builds a complete record for state f at time t.
DiagnosticsRecord assemble_record(const DistributionField& f, const PhaseSpace& ps,
                                  const BoundaryConfig& cfg, double epsilon, double kappa,
                                  double initial_mass_value, double int_fperp2, double int_boundary);

struct FitWindow {
    double t0 = 0.0;
    double t1 = 0.0;
};

struct RateFit {
    double lambda = 0.0;     ///< decay rate, 1/time
    double prefactor = 0.0;  ///< C with value(t) ~ C e^{-lambda t} value(series start)
    FitWindow window;        ///< window actually used
    double r_squared = 0.0;
    std::size_t samples = 0;
    bool window_shrunk = false;
};

/// Least squares of log(value) against t over samples with t0 <= t <= t1.
/// Samples with non-positive value shrink the window to the last time before
/// the first such sample (reported in window_shrunk); fewer than 10 usable
/// samples throw NumericalError.
RateFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                       FitWindow window);

/// [max(10 eps^2, 0.1 T), t_floor], t_floor the last time with value > 1e-12 * value(0)
/// before the series first fails to decrease.
/// When the start would pass t_floor / 2 the window becomes [0.1 t_floor, t_floor].
FitWindow default_fit_window(const std::vector<double>& times, const std::vector<double>& values,
                             double epsilon);

/// Fits the norm_f_minus_Mc column. A series that starts at rounding level
/// (1e-12 relative to max(1, ||f||)) is reported as constant: lambda = 0,
/// R^2 = 1, C = 1. Without a window the default window is used.
RateFit fit_records(const std::vector<DiagnosticsRecord>& records, double epsilon,
                    std::optional<FitWindow> window = std::nullopt);

/// Named CSV column of a record series. Throws ConfigError on an unknown name.
std::vector<double> record_column(const std::vector<DiagnosticsRecord>& records, const std::string& name);

struct EntropyReport {
    double min_ratio = 1.0;       ///< min E / ||f - M_c||^2 over records with a non-zero distance
    double max_ratio = 1.0;
    double worst_increase = 0.0;  ///< max (E_{k+1} - E_k) / E_0
    bool equivalent = true;       ///< ratios within [1/2, 3/2]
    bool monotone = true;         ///< worst_increase <= slack
};

/// Equivalence and monotonicity of E along a run. Increases are measured
/// relative to E at the first record, which keeps the test meaningful once
/// the solution reaches its rounding floor.
EntropyReport entropy_report(const std::vector<DiagnosticsRecord>& records, double slack = 1e-9);

/// max_k |mass_k - mass_0| / |mass_0| (absolute when mass_0 = 0).
double mass_drift(const std::vector<DiagnosticsRecord>& records);

/// ||f|| never grows between records by more than the relative tolerance.
bool norm_non_increasing(const std::vector<DiagnosticsRecord>& records, double tolerance = 1e-12);

/// Output of run_simulation.
struct Trajectory {
    std::vector<DiagnosticsRecord> records;
    std::vector<DistributionField> snapshots;  ///< one per record when requested
    DistributionField final_field;
    double epsilon = 1.0;
    double dt = 0.0;
    std::size_t steps = 0;
    double kappa = 0.0;
    double initial_mass = 0.0;      ///< M0
    double reference_mass = 0.0;    ///< M_c
    double initial_norm_squared = 0.0;
    /// The two ledger integrals accumulated with every other step (trapezoid
    /// at 2 dt), for the cadence-halving reliability check.
    double coarse_int_fperp2 = 0.0;
    double coarse_int_boundary = 0.0;
    double coarse_end_time = 0.0;
};

struct LedgerReport {
    double initial_norm_squared = 0.0;  ///< ||f_in||^2
    double final_norm_squared = 0.0;
    double collision_term = 0.0;        ///< (2/eps^2) int ||f_perp||^2
    double boundary_term = 0.0;         ///< (1/eps) int (f^2, n.v)
    double lhs = 0.0;
    double slack = 0.0;                 ///< ||f_in||^2 - lhs
    double relative_slack = 0.0;
    double cadence_discrepancy = 0.0;   ///< relative change when the cadence is halved
    bool holds = false;                 ///< lhs <= ||f_in||^2 (1 + 1e-3)
    bool reliable = false;              ///< cadence discrepancy < 1e-3
};

LedgerReport dissipation_ledger(const Trajectory& trajectory, double tolerance = 1e-3);

}  // namespace kinslab
