#include "kinslab/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "kinslab/asymptotics.hpp"
#include "kinslab/errors.hpp"
#include "kinslab/worker_pool.hpp"

namespace kinslab {

namespace fs = std::filesystem;
using nlohmann::json;

const char* version_string() { return KINSLAB_VERSION; }

void write_file_atomic(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << text;
        if (!out.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

namespace {

json fit_json(const RateFit& fit) {
    return {{"lambda", fit.lambda},          {"C", fit.prefactor},     {"t0", fit.window.t0},
            {"t1", fit.window.t1},           {"r_squared", fit.r_squared}, {"samples", fit.samples},
            {"window_shrunk", fit.window_shrunk}};
}

json ledger_json(const LedgerReport& l) {
    return {{"initial_norm_squared", l.initial_norm_squared},
            {"final_norm_squared", l.final_norm_squared},
            {"collision_term", l.collision_term},
            {"boundary_term", l.boundary_term},
            {"lhs", l.lhs},
            {"slack", l.slack},
            {"relative_slack", l.relative_slack},
            {"cadence_discrepancy", l.cadence_discrepancy},
            {"holds", l.holds},
            {"reliable", l.reliable}};
}

std::string epsilon_label(double eps) {
    std::ostringstream os;
    os << std::setprecision(12) << eps;
    return "eps_" + os.str();
}

void check_epsilons(const std::vector<double>& eps) {
    if (eps.empty()) throw ConfigError("--eps: the epsilon list is empty");
    for (std::size_t k = 0; k < eps.size(); ++k) {
        if (!(eps[k] > 0.0 && eps[k] <= 1.0)) {
            throw ConfigError("--eps: every epsilon must lie in (0,1], got " + std::to_string(eps[k]));
        }
        for (std::size_t m = 0; m < k; ++m) {
            if (eps[m] == eps[k]) throw ConfigError("--eps: duplicate epsilon " + std::to_string(eps[k]));
        }
    }
}

std::string csv_text(const std::vector<DiagnosticsRecord>& records) {
    std::ostringstream os;
    write_diagnostics_csv(os, records);
    return os.str();
}

json manifest(const RunConfig& cfg, const std::vector<std::string>& outputs) {
    return {{"version", version_string()}, {"config", config_echo(cfg)}, {"outputs", outputs}};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json gap_json(const DiffusionGap& g) {
    return {{"sup_all", g.sup_all},
            {"sup_after_layer", g.sup_after_layer},
            {"sup_with_layer", g.sup_with_layer},
            {"l2_time", g.l2_time},
            {"t_eps", g.t_eps},
            {"layer_used", g.layer_used},
            {"interpolated", g.interpolated},
            {"samples", g.samples}};
}

bool decreasing_in_epsilon(std::vector<std::pair<double, double>> eps_gap) {
    std::sort(eps_gap.begin(), eps_gap.end(), [](auto a, auto b) { return a.first > b.first; });
    for (std::size_t k = 1; k < eps_gap.size(); ++k) {
        if (!(eps_gap[k].second < eps_gap[k - 1].second)) return false;
    }
    return true;
}

}  // namespace

json run_summary(const RunConfig& cfg, const Trajectory& traj, std::optional<FitWindow> window) {
    const auto& last = traj.records.back();
    json s;
    s["run"] = {{"dt", traj.dt},
                {"steps", traj.steps},
                {"records", traj.records.size()},
                {"kappa", traj.kappa},
                {"initial_mass", traj.initial_mass},
                {"reference_mass", traj.reference_mass},
                {"stable_dt", stable_dt(cfg.sim)}};
    s["final"] = {{"t", last.t},
                  {"norm_f_minus_Mc", last.norm_f_minus_mc},
                  {"norm_fperp", last.norm_fperp},
                  {"norm_f", last.norm_f},
                  {"mass", last.mass},
                  {"entropy_E", last.entropy}};
    try {
        s["rate_fit"] = fit_json(fit_records(traj.records, cfg.sim.epsilon, window));
    } catch (const NumericalError& e) {
        s["rate_fit"] = {{"error", e.what()}};
    }
    s["ledger"] = ledger_json(dissipation_ledger(traj));
    const EntropyReport ent = entropy_report(traj.records);
    s["checks"] = {{"mass_drift", mass_drift(traj.records)},
                   {"norm_non_increasing", norm_non_increasing(traj.records)},
                   {"entropy_min_ratio", ent.min_ratio},
                   {"entropy_max_ratio", ent.max_ratio},
                   {"entropy_worst_increase", ent.worst_increase},
                   {"entropy_equivalent", ent.equivalent},
                   {"entropy_monotone", ent.monotone}};
    return s;
}

json cmd_run(const RunConfig& cfg, const fs::path& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    RunConfig resolved = cfg;
    resolved.sim.keep_snapshots = cfg.output.snapshots;
    const Trajectory traj = run_simulation(resolved.sim);

    std::vector<std::string> outputs{"diagnostics.csv", "summary.json", "timing.json"};
    if (cfg.output.snapshots) outputs.emplace_back("snapshots/");
    json summary = run_summary(resolved, traj);
    summary["manifest"] = manifest(resolved, outputs);

    fs::create_directories(out_dir);
    if (cfg.output.snapshots) {
        for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
            char name[32];
            std::snprintf(name, sizeof name, "snap_%05zu.txt", k);
            std::ostringstream os;
            write_snapshot(os, traj.snapshots[k], resolved.sim.vmax);
            write_file_atomic(out_dir / "snapshots" / name, os.str());
        }
    }
    write_file_atomic(out_dir / "diagnostics.csv", csv_text(traj.records));
    write_file_atomic(out_dir / "summary.json", summary.dump(2) + "\n");
    write_file_atomic(out_dir / "timing.json", json{{"wall_seconds", seconds_since(start)}}.dump(2) + "\n");
    return summary;
}

json cmd_sweep(const RunConfig& base, const std::vector<double>& epsilons, unsigned workers,
               const fs::path& out_dir) {
    check_epsilons(epsilons);
    base.sim.validate();
    const auto start = std::chrono::steady_clock::now();
    std::vector<json> members(epsilons.size());
    run_indexed(epsilons.size(), workers, [&](std::size_t k) {
        RunConfig cfg = base;
        cfg.sim.epsilon = epsilons[k];
        const std::string dir = epsilon_label(epsilons[k]);
        json entry{{"epsilon", epsilons[k]}, {"directory", dir}};
        try {
            const json summary = cmd_run(cfg, out_dir / dir);
            entry["rate_fit"] = summary["rate_fit"];
            entry["ledger_relative_slack"] = summary["ledger"]["relative_slack"];
            entry["ledger_holds"] = summary["ledger"]["holds"];
            entry["checks"] = summary["checks"];
            entry["dt"] = summary["run"]["dt"];
            entry["ok"] = !summary["rate_fit"].contains("error");
        } catch (const std::exception& e) {
            entry["ok"] = false;
            entry["error"] = e.what();
        }
        members[k] = std::move(entry);
    });

    json sweep;
    sweep["members"] = members;
    bool partial = false;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& m : members) {
        if (!m["ok"].get<bool>()) {
            partial = true;
            continue;
        }
        const double lambda = m["rate_fit"]["lambda"].get<double>();
        lo = std::min(lo, lambda);
        hi = std::max(hi, lambda);
    }
    sweep["partial"] = partial;
    if (hi > 0.0 && lo > 0.0) {
        sweep["lambda_min"] = lo;
        sweep["lambda_max"] = hi;
        sweep["lambda_ratio"] = hi / lo;
    } else {
        sweep["lambda_ratio"] = nullptr;
    }
    RunConfig echo = base;
    sweep["manifest"] = manifest(echo, {"sweep.json"});
    sweep["manifest"]["epsilons"] = epsilons;
    write_file_atomic(out_dir / "sweep.json", sweep.dump(2) + "\n");
    write_file_atomic(out_dir / "timing.json", json{{"wall_seconds", seconds_since(start)}}.dump(2) + "\n");
    return sweep;
}

double loglog_order(const std::vector<double>& eps, const std::vector<double>& gaps) {
    if (eps.size() != gaps.size() || eps.size() < 2) {
        throw ContractViolation("loglog_order: need at least two matched samples");
    }
    double xm = 0.0, ym = 0.0;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        if (!(eps[k] > 0.0 && gaps[k] > 0.0)) throw NumericalError("loglog_order: non-positive sample");
        xm += std::log(eps[k]);
        ym += std::log(gaps[k]);
    }
    xm /= static_cast<double>(eps.size());
    ym /= static_cast<double>(eps.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        const double dx = std::log(eps[k]) - xm;
        sxx += dx * dx;
        sxy += dx * (std::log(gaps[k]) - ym);
    }
    return sxy / sxx;
}

json cmd_limit(const RunConfig& base, const std::vector<double>& epsilons, unsigned workers,
               const fs::path& out_dir) {
    check_epsilons(epsilons);
    base.sim.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = epsilons.size();

    // Jobs 2k and 2k+1: the run itself and its control on twice the cells.
    std::vector<std::optional<Trajectory>> runs(2 * n);
    std::vector<std::string> errors(2 * n);
    run_indexed(2 * n, workers, [&](std::size_t job) {
        SimConfig cfg = base.sim;
        cfg.epsilon = epsilons[job / 2];
        cfg.keep_snapshots = true;
        if (job % 2 == 1) cfg.nx *= 2;
        try {
            runs[job] = run_simulation(cfg);
        } catch (const std::exception& e) {
            errors[job] = e.what();
        }
    });

    const bool prepared = well_prepared(base.sim.initial);
    const PhaseSpace ps = base.sim.phase_space();
    SimConfig fine_cfg = base.sim;
    fine_cfg.nx *= 2;
    const PhaseSpace ps_fine = fine_cfg.phase_space();

    json members = json::array();
    bool partial = false;
    std::vector<double> ok_eps, raw_sup, corrected_sup;
    for (std::size_t k = 0; k < n; ++k) {
        const double eps = epsilons[k];
        json entry{{"epsilon", eps}};
        if (!runs[2 * k] || !runs[2 * k + 1]) {
            partial = true;
            entry["ok"] = false;
            entry["error"] = errors[2 * k].empty() ? errors[2 * k + 1] : errors[2 * k];
            members.push_back(entry);
            continue;
        }
        const Trajectory& coarse = *runs[2 * k];
        const Trajectory& fine = *runs[2 * k + 1];
        std::vector<double> times;
        for (const auto& s : coarse.snapshots) times.push_back(s.time());

        const DistributionField& f_in = coarse.snapshots.front();
        const MacroField rho_in = moment0(f_in, ps.velocity);
        const ParabolicTrajectory parabolic = solve_parabolic(rho_in, ps, times);
        std::optional<LayerTrajectory> layer;
        if (!prepared) {
            DistributionField psi_in = perp(f_in, ps.velocity);
            layer = solve_layer(psi_in, eps, base.sim.collision, times, ps.velocity);
        }
        const LayerTrajectory* layer_ptr = layer ? &*layer : nullptr;
        const DiffusionGap raw = diffusion_gap(coarse.snapshots, parabolic, layer_ptr, eps, ps);

        std::vector<DistributionField> corrected;
        corrected.reserve(coarse.snapshots.size());
        for (std::size_t s = 0; s < coarse.snapshots.size(); ++s) {
            if (std::abs(fine.snapshots[s].time() - coarse.snapshots[s].time()) > 1e-12) {
                throw ContractViolation("cmd_limit: control run samples are misaligned");
            }
            corrected.push_back(richardson(restrict_to_coarse(fine.snapshots[s], ps_fine.measure),
                                           coarse.snapshots[s]));
        }
        const DiffusionGap fixed = diffusion_gap(corrected, parabolic, layer_ptr, eps, ps);

        entry["ok"] = true;
        entry["gap_raw"] = gap_json(raw);
        entry["gap_corrected"] = gap_json(fixed);
        entry["dt"] = coarse.dt;
        entry["control_dt"] = fine.dt;
        entry["parabolic"] = {{"dt", parabolic.dt}, {"steps", parabolic.steps}};
        if (layer) entry["layer_substep"] = layer->substep;
        members.push_back(entry);
        ok_eps.push_back(eps);
        const double raw_value = prepared ? raw.sup_all : raw.sup_with_layer;
        const double fixed_value = prepared ? fixed.sup_all : fixed.sup_with_layer;
        raw_sup.push_back(raw_value);
        corrected_sup.push_back(fixed_value);
    }

    json limit;
    limit["members"] = members;
    limit["partial"] = partial;
    limit["well_prepared"] = prepared;
    limit["metric"] = prepared ? "sup_all" : "sup_with_layer";
    if (ok_eps.size() >= 2) {
        std::vector<std::pair<double, double>> raw_pairs, fixed_pairs;
        for (std::size_t k = 0; k < ok_eps.size(); ++k) {
            raw_pairs.emplace_back(ok_eps[k], raw_sup[k]);
            fixed_pairs.emplace_back(ok_eps[k], corrected_sup[k]);
        }
        limit["order_raw"] = loglog_order(ok_eps, raw_sup);
        limit["order_corrected"] = loglog_order(ok_eps, corrected_sup);
        limit["monotone_raw"] = decreasing_in_epsilon(raw_pairs);
        limit["monotone_corrected"] = decreasing_in_epsilon(fixed_pairs);
    }
    limit["manifest"] = manifest(base, {"limit.json"});
    limit["manifest"]["epsilons"] = epsilons;
    limit["manifest"]["control_nx"] = fine_cfg.nx;
    write_file_atomic(out_dir / "limit.json", limit.dump(2) + "\n");
    write_file_atomic(out_dir / "timing.json", json{{"wall_seconds", seconds_since(start)}}.dump(2) + "\n");
    return limit;
}

json cmd_fit(const fs::path& csv, const std::string& column, std::optional<FitWindow> window, double epsilon) {
    if (window && !(window->t0 < window->t1)) throw ConfigError("--t0/--t1: the window must satisfy t0 < t1");
    std::ifstream in(csv);
    if (!in) throw ConfigError("cannot read diagnostics file '" + csv.string() + "'");
    const auto records = read_diagnostics_csv(in);
    if (records.empty()) throw ConfigError("diagnostics file '" + csv.string() + "' has no rows");
    const std::vector<double> times = record_column(records, "t");
    const std::vector<double> values = record_column(records, column);
    const FitWindow w = window ? *window : default_fit_window(times, values, epsilon);
    json out = fit_json(fit_decay_rate(times, values, w));
    out["column"] = column;
    out["source"] = csv.string();
    return out;
}

}  // namespace kinslab
