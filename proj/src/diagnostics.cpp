#include "kinslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "kinslab/errors.hpp"

namespace kinslab {

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& records) {
    out << kDiagnosticsColumns << '\n';
    out << std::setprecision(17);
    for (const auto& r : records) {
        out << r.t << ',' << r.norm_f_minus_mc << ',' << r.norm_fperp << ',' << r.mass << ','
            << r.boundary_dissipation << ',' << r.a_quantity << ',' << r.entropy << ','
            << r.int_fperp2 << ',' << r.int_boundary << '\n';
    }
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("diagnostics csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kDiagnosticsColumns) throw ConfigError("diagnostics csv: unexpected header '" + line + "'");
    std::vector<DiagnosticsRecord> records;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        DiagnosticsRecord r;
        if (!(row >> r.t >> r.norm_f_minus_mc >> r.norm_fperp >> r.mass >> r.boundary_dissipation >>
              r.a_quantity >> r.entropy >> r.int_fperp2 >> r.int_boundary)) {
            throw ConfigError("diagnostics csv: malformed row at line " + std::to_string(lineno));
        }
        records.push_back(r);
    }
    return records;
}

double entropy_cross_term(const DistributionField& f, const EllipticSolution& u, const PhaseSpace& ps) {
    require_shape(f, ps, "entropy_cross_term");
    // (v u', f_perp) = sum_i e^{-phi_i} dx u'_i <v f>_i since <v> = 0.
    const MacroField flux = moment1(f, ps.velocity);
    double s = 0.0;
    for (std::size_t i = 0; i < f.nx(); ++i) {
        s += ps.measure.spatial[i] * u.center_gradient(i) * flux.values[i];
    }
    return s;
}

double distance_squared(const DistributionField& f, double reference_mass, const MeasureWeights& m) {
    double total = 0.0;
    for (std::size_t i = 0; i < f.nx(); ++i) {
        const auto fi = f.cell(i);
        double s = 0.0;
        for (std::size_t j = 0; j < f.nv(); ++j) {
            const double d = fi[j] - reference_mass;
            s += m.velocity[j] * d * d;
        }
        total += m.spatial[i] * s;
    }
    return total;
}

double modified_entropy(const DistributionField& f, const EllipticSolution& u, double kappa,
                        double epsilon, double reference_mass, const PhaseSpace& ps) {
    const double base = distance_squared(f, reference_mass, ps.measure);
    if (kappa == 0.0) return base;
    return base + kappa * epsilon * entropy_cross_term(f, u, ps);
}

double adaptive_kappa(double distance_sq, double cross_term, double epsilon) {
    const double denom = 2.0 * epsilon * std::abs(cross_term) + std::numeric_limits<double>::min();
    return std::min(0.1, distance_sq / denom);
}

DiagnosticsRecord assemble_record(const DistributionField& f, const PhaseSpace& ps,
                                  const BoundaryConfig& cfg, double epsilon, double kappa,
                                  double initial_mass_value, double int_fperp2, double int_boundary) {
    DiagnosticsRecord r;
    r.t = f.time();
    const EntropyAux aux = entropy_aux(f, cfg, ps, initial_mass_value);
    const double dist2 = distance_squared(f, aux.reference_mass, ps.measure);
    r.norm_f_minus_mc = std::sqrt(dist2);
    r.norm_fperp = std::sqrt(std::max(0.0, perp_norm_squared(f, ps)));
    r.mass = total_mass(f, ps.measure);
    r.boundary_dissipation = boundary_dissipation(closed_trace(f, cfg, ps.velocity), ps.measure);
    r.a_quantity = aux.a_quantity;
    r.entropy = dist2 + kappa * epsilon * entropy_cross_term(f, aux.solution, ps);
    r.int_fperp2 = int_fperp2;
    r.int_boundary = int_boundary;
    r.norm_f = norm_dm(f, ps.measure);
    return r;
}

RateFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                       FitWindow window) {
    if (times.size() != values.size()) throw ContractViolation("fit_decay_rate: length mismatch");
    if (!(window.t0 < window.t1)) throw ContractViolation("fit_decay_rate: empty window");
    RateFit fit;
    fit.window = window;
    std::vector<double> ts, ys;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < window.t0 || times[k] > window.t1) continue;
        if (!(values[k] > 0.0)) {
            fit.window_shrunk = true;
            break;
        }
        ts.push_back(times[k]);
        ys.push_back(std::log(values[k]));
    }
    if (fit.window_shrunk && !ts.empty()) fit.window.t1 = ts.back();
    if (ts.size() < 10) {
        throw NumericalError("fit_decay_rate: fewer than 10 positive samples in [" +
                             std::to_string(window.t0) + ", " + std::to_string(window.t1) + "]");
    }
    const double n = static_cast<double>(ts.size());
    double tm = 0.0, ym = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        tm += ts[k];
        ym += ys[k];
    }
    tm /= n;
    ym /= n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        stt += (ts[k] - tm) * (ts[k] - tm);
        sty += (ts[k] - tm) * (ys[k] - ym);
        syy += (ys[k] - ym) * (ys[k] - ym);
    }
    const double slope = stt > 0.0 ? sty / stt : 0.0;
    const double intercept = ym - slope * tm;
    double sse = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double e = ys[k] - (intercept + slope * ts[k]);
        sse += e * e;
    }
    // A flat series is fitted exactly by slope 0.
    const double scale = std::max(1.0, std::abs(ym));
    fit.r_squared = syy <= 1e-24 * scale * scale * n ? 1.0 : std::clamp(1.0 - sse / syy, 0.0, 1.0);
    fit.lambda = syy <= 1e-24 * scale * scale * n ? 0.0 : -slope;
    fit.samples = ts.size();
    const double reference = values.front() > 0.0 ? values.front() : std::exp(ys.front());
    fit.prefactor = std::exp(intercept) / reference;
    return fit;
}

FitWindow default_fit_window(const std::vector<double>& times, const std::vector<double>& values,
                             double epsilon) {
    if (times.empty() || times.size() != values.size()) {
        throw ContractViolation("default_fit_window: empty or mismatched series");
    }
    const double horizon = times.back();
    FitWindow w;
    w.t0 = std::max(10.0 * epsilon * epsilon, 0.1 * horizon);
    const double floor = 1e-12 * std::abs(values.front());
    w.t1 = times.front();
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(values[k] > floor)) break;
        // A series that stops decreasing has reached its rounding plateau.
        if (k > 0 && !(values[k] < values[k - 1])) break;
        w.t1 = times[k];
    }
    // Long layers (10 eps^2 close to the horizon) would leave no window.
    if (w.t0 >= 0.5 * w.t1) w.t0 = 0.1 * w.t1;
    return w;
}

RateFit fit_records(const std::vector<DiagnosticsRecord>& records, double epsilon,
                    std::optional<FitWindow> window) {
    if (records.empty()) throw ContractViolation("fit_records: empty series");
    const std::vector<double> times = record_column(records, "t");
    const std::vector<double> values = record_column(records, "norm_f_minus_Mc");
    const double scale = std::max(1.0, records.front().norm_f);
    if (!(values.front() > 1e-12 * scale)) {
        RateFit fit;
        fit.prefactor = 1.0;
        fit.r_squared = 1.0;
        fit.window = window.value_or(FitWindow{times.front(), times.back()});
        fit.samples = records.size();
        return fit;
    }
    return fit_decay_rate(times, values, window ? *window : default_fit_window(times, values, epsilon));
}

std::vector<double> record_column(const std::vector<DiagnosticsRecord>& records, const std::string& name) {
    double DiagnosticsRecord::*member = nullptr;
    if (name == "t") member = &DiagnosticsRecord::t;
    else if (name == "norm_f_minus_Mc") member = &DiagnosticsRecord::norm_f_minus_mc;
    else if (name == "norm_fperp") member = &DiagnosticsRecord::norm_fperp;
    else if (name == "mass") member = &DiagnosticsRecord::mass;
    else if (name == "boundary_dissipation") member = &DiagnosticsRecord::boundary_dissipation;
    else if (name == "A_quantity") member = &DiagnosticsRecord::a_quantity;
    else if (name == "entropy_E") member = &DiagnosticsRecord::entropy;
    else if (name == "int_fperp2") member = &DiagnosticsRecord::int_fperp2;
    else if (name == "int_boundary") member = &DiagnosticsRecord::int_boundary;
    else throw ConfigError("unknown diagnostics column '" + name + "'");
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.*member);
    return out;
}

EntropyReport entropy_report(const std::vector<DiagnosticsRecord>& records, double slack) {
    EntropyReport rep;
    if (records.empty()) return rep;
    bool seen = false;
    for (const auto& r : records) {
        const double d2 = r.norm_f_minus_mc * r.norm_f_minus_mc;
        if (d2 == 0.0) {
            if (r.entropy != 0.0) rep.equivalent = false;
            continue;
        }
        const double ratio = r.entropy / d2;
        rep.min_ratio = seen ? std::min(rep.min_ratio, ratio) : ratio;
        rep.max_ratio = seen ? std::max(rep.max_ratio, ratio) : ratio;
        seen = true;
    }
    if (seen && (rep.min_ratio < 0.5 || rep.max_ratio > 1.5)) rep.equivalent = false;
    const double base = std::abs(records.front().entropy);
    for (std::size_t k = 1; k < records.size(); ++k) {
        const double rise = records[k].entropy - records[k - 1].entropy;
        const double rel = base > 0.0 ? rise / base : (rise > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        rep.worst_increase = std::max(rep.worst_increase, rel);
    }
    rep.monotone = rep.worst_increase <= slack;
    return rep;
}

double mass_drift(const std::vector<DiagnosticsRecord>& records) {
    if (records.empty()) return 0.0;
    const double m0 = records.front().mass;
    const double scale = m0 != 0.0 ? std::abs(m0) : 1.0;
    double worst = 0.0;
    for (const auto& r : records) worst = std::max(worst, std::abs(r.mass - m0) / scale);
    return worst;
}

bool norm_non_increasing(const std::vector<DiagnosticsRecord>& records, double tolerance) {
    for (std::size_t k = 1; k < records.size(); ++k) {
        if (records[k].norm_f > records[k - 1].norm_f * (1.0 + tolerance)) return false;
    }
    return true;
}

LedgerReport dissipation_ledger(const Trajectory& traj, double tolerance) {
    if (traj.records.empty()) throw ContractViolation("dissipation_ledger: empty trajectory");
    const auto& last = traj.records.back();
    const double eps = traj.epsilon;
    LedgerReport r;
    r.initial_norm_squared = traj.initial_norm_squared;
    r.final_norm_squared = last.norm_f * last.norm_f;
    r.collision_term = 2.0 / (eps * eps) * last.int_fperp2;
    r.boundary_term = last.int_boundary / eps;
    r.lhs = r.final_norm_squared + r.collision_term + r.boundary_term;
    r.slack = r.initial_norm_squared - r.lhs;
    const double scale = r.initial_norm_squared > 0.0 ? r.initial_norm_squared : 1.0;
    r.relative_slack = r.slack / scale;
    r.holds = r.lhs <= r.initial_norm_squared * (1.0 + tolerance) + 1e-300;

    // Compare with the integrals taken at twice the step; both end at the same
    // time only when the step count is even, otherwise the coarse sum stops one
    // step short and the gap is part of the discrepancy.
    const double coarse = 2.0 / (eps * eps) * traj.coarse_int_fperp2 + traj.coarse_int_boundary / eps;
    const double fine = r.collision_term + r.boundary_term;
    r.cadence_discrepancy = std::abs(fine - coarse) / scale;
    r.reliable = r.cadence_discrepancy < tolerance;
    return r;
}

}  // namespace kinslab
