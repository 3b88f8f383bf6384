// Acceptance report: one PASS/FAIL line per criterion. Tolerances are fixed here.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kinslab/asymptotics.hpp"
#include "kinslab/boundary.hpp"
#include "kinslab/collision.hpp"
#include "kinslab/commands.hpp"
#include "kinslab/elliptic.hpp"
#include "kinslab/transport.hpp"

using namespace kinslab;

namespace {

namespace tol {
constexpr double kIdentity = 1e-12;
constexpr double kIdentitySeconds = 1.0;
constexpr double kLedgerSlack = 1e-3;
constexpr double kRunSeconds = 120.0;
constexpr double kMassDrift = 1e-10;
constexpr double kRSquared = 0.99;
constexpr double kRateRatio = 3.0;
constexpr double kSweepSeconds = 1800.0;
constexpr double kLimitOrder = 0.4;
constexpr double kLimitSeconds = 7200.0;
constexpr double kBgkLayer = 1e-14;
constexpr double kFpLayer = 1e-2;
constexpr double kEllipticLo = 1.8;
constexpr double kEllipticHi = 2.2;
constexpr double kElliptic = 1e-8;
constexpr double kEntropyLo = 0.5;
constexpr double kEntropyHi = 1.5;
constexpr double kEntropySlack = 1e-9;
constexpr double kMoment = 1e-14;
constexpr double kDissipative = 1e-14;
constexpr double kEigenOrder = 1.8;
}  // namespace tol

constexpr double kPi = 3.14159265358979323846;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Line {
    int id;
    bool pass;
    std::string detail;
};

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(4) << x;
    return os.str();
}

struct TimedRun {
    Trajectory traj;
    double seconds = 0.0;
};

TimedRun timed(const SimConfig& cfg) {
    const auto start = Clock::now();
    TimedRun r{run_simulation(cfg), 0.0};
    r.seconds = seconds_since(start);
    return r;
}

SimConfig base_config(double eps, CollisionKind kind, double alpha, double beta, double phi_amplitude) {
    SimConfig cfg;
    cfg.epsilon = eps;
    cfg.collision = kind;
    cfg.boundary = BoundaryConfig::uniform(alpha, beta);
    cfg.potential = phi_amplitude == 0.0 ? PotentialSpec{} : PotentialSpec{PotentialKind::Cosine, phi_amplitude, {}, {}};
    cfg.initial = InitialSpec{};  // 1 + 0.5 cos(pi x)
    return cfg;
}

// Both sides of the boundary identity evaluated directly from the closed trace.
double identity_residual(const WallTrace& t, double alpha, double beta, const PhaseSpace& ps) {
    double lhs = 0.0, defect = 0.0, trace_form = 0.0, scale = 0.0;
    const double s = alpha + beta;
    for (Wall w : kWalls) {
        const double n = w == Wall::Left ? -1.0 : 1.0;
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < ps.nv(); ++j) {
            const double vn = n * ps.velocity.nodes[j];
            const double b = ps.measure.boundary_node(w, j);
            const double f = t.at(w)[j];
            lhs += b * vn * f * f;
            scale += b * std::abs(vn) * f * f;
            if (vn > 0.0) {
                num += ps.velocity.weights[j] * vn * f;
                den += ps.velocity.weights[j] * vn;
            }
        }
        const double d = num / den;
        for (std::size_t j = 0; j < ps.nv(); ++j) {
            const double vn = n * ps.velocity.nodes[j];
            if (vn <= 0.0) continue;
            const double b = ps.measure.boundary_node(w, j);
            const double f = t.at(w)[j];
            defect += b * vn * ((1.0 - beta * beta) * (f - d) * (f - d) + (1.0 - s * s) * d * d);
            trace_form += b * vn * ((alpha * alpha + 2.0 * alpha * beta) * (f - d) * (f - d) + (1.0 - s * s) * f * f);
        }
    }
    return std::max(std::abs(lhs - defect), std::abs(lhs - trace_form)) / scale;
}

Line criterion1() {
    const auto start = Clock::now();
    const PhaseSpace ps = build_phase_space(16, 64, 8.0, PotentialSpec{PotentialKind::Cosine, 0.5, {}, {}});
    const std::vector<std::pair<double, double>> configs{{1, 0}, {0, 1}, {0.5, 0.5}, {0.3, 0.3}, {0, 0}};
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    double worst = 0.0;
    int traces = 0;
    for (int k = 0; k < 200; ++k) {
        const auto [alpha, beta] = configs[k % configs.size()];
        const BoundaryConfig cfg = BoundaryConfig::uniform(alpha, beta);
        WallTrace t = WallTrace::zeros(ps.nv());
        for (Wall w : kWalls)
            for (std::size_t j = 0; j < ps.nv(); ++j)
                if (ps.velocity.is_outgoing(w, j)) t.at(w)[j] = u(rng);
        apply_incoming_closure(t, cfg, ps.velocity);
        const IdentityReport r = identity_residuals(t, cfg, ps, {0.0, 0.0}, {0.0, 0.0});
        worst = std::max({worst, identity_residual(t, alpha, beta, ps), r.residual_defect_form, r.residual_trace_form});
        ++traces;
    }
    const double secs = seconds_since(start);
    return {1, worst <= tol::kIdentity && secs < tol::kIdentitySeconds,
            std::to_string(traces) + " traces, max residual " + fmt(worst) + ", " + fmt(secs) + " s"};
}

struct LedgerCase {
    std::string name;
    TimedRun run;
};

std::vector<LedgerCase> ledger_runs() {
    std::vector<LedgerCase> out;
    for (CollisionKind kind : {CollisionKind::Bgk, CollisionKind::FokkerPlanck})
        for (double eps : {1.0, 0.25})
            for (double phi : {0.0, 0.5}) {
                std::ostringstream name;
                name << to_string(kind) << " eps=" << eps << " phi=" << phi;
                out.push_back({name.str(), timed(base_config(eps, kind, 1.0, 0.0, phi))});
            }
    return out;
}

Line criterion2(const std::vector<LedgerCase>& runs) {
    bool pass = true;
    double worst_violation = -1.0, slowest = 0.0;
    std::string failed;
    for (const auto& c : runs) {
        const LedgerReport l = dissipation_ledger(c.run.traj, tol::kLedgerSlack);
        // Violation relative to ||f_in||^2; negative means slack.
        const double violation = (l.lhs - l.initial_norm_squared) / l.initial_norm_squared;
        worst_violation = std::max(worst_violation, violation);
        slowest = std::max(slowest, c.run.seconds);
        const bool ok = violation <= tol::kLedgerSlack && norm_non_increasing(c.run.traj.records) &&
                        c.run.seconds < tol::kRunSeconds;
        if (!ok) failed += " [" + c.name + "]";
        pass = pass && ok;
    }
    return {2, pass,
            std::to_string(runs.size()) + " runs, worst (lhs-||f_in||^2)/||f_in||^2 = " + fmt(worst_violation) +
                ", slowest " + fmt(slowest) + " s" + failed};
}

Line criterion3(const std::vector<const Trajectory*>& conservative) {
    double worst = 0.0;
    for (const Trajectory* t : conservative) {
        const double m0 = t->records.front().mass;
        for (const auto& r : t->records) worst = std::max(worst, std::abs(r.mass - m0) / std::abs(m0));
    }
    return {3, worst <= tol::kMassDrift, std::to_string(conservative.size()) + " runs, max drift " + fmt(worst)};
}

struct FitOutcome {
    double lambda = 0.0;
    double r2 = 0.0;
    bool ok = false;
};

FitOutcome fit_of(const Trajectory& t) {
    try {
        const RateFit f = fit_records(t.records, t.epsilon);
        return {f.lambda, f.r_squared, true};
    } catch (const std::exception&) {
        return {};
    }
}

Line rate_line(int id, const std::vector<std::pair<std::string, const Trajectory*>>& group, double* ratio_out) {
    bool pass = true;
    double lo = INFINITY, hi = 0.0;
    std::ostringstream detail;
    for (const auto& [name, t] : group) {
        const FitOutcome f = fit_of(*t);
        detail << name << ": lambda=" << fmt(f.lambda) << " R2=" << fmt(f.r2) << "; ";
        pass = pass && f.ok && f.lambda > 0.0 && f.r2 > tol::kRSquared;
        lo = std::min(lo, f.lambda);
        hi = std::max(hi, f.lambda);
    }
    const double ratio = lo > 0.0 ? hi / lo : INFINITY;
    if (ratio_out) *ratio_out = ratio;
    detail << "max/min=" << fmt(ratio);
    return {id, pass && ratio <= tol::kRateRatio, detail.str()};
}

Line criterion6() {
    const auto start = Clock::now();
    RunConfig cfg;
    cfg.sim = base_config(1.0, CollisionKind::Bgk, 1.0, 0.0, 0.0);
    cfg.sim.nx = 128;
    cfg.sim.nv = 64;
    cfg.sim.final_time = 0.5;
    cfg.sim.record_interval = 0.005;
    const auto dir = std::filesystem::temp_directory_path() / "kinslab_acceptance_limit";
    const auto result = cmd_limit(cfg, {0.4, 0.2, 0.1, 0.05}, 1, dir);
    std::filesystem::remove_all(dir);
    const double secs = seconds_since(start);
    std::ostringstream detail;
    detail << "corrected sup gaps:";
    for (const auto& m : result["members"]) {
        if (m["ok"].get<bool>()) detail << ' ' << fmt(m["gap_corrected"]["sup_all"].get<double>());
    }
    const bool complete = !result["partial"].get<bool>() && result.contains("order_corrected");
    const double order = complete ? result["order_corrected"].get<double>() : NAN;
    const bool monotone = complete && result["monotone_corrected"].get<bool>();
    detail << ", order " << fmt(order) << " (raw " << fmt(complete ? result["order_raw"].get<double>() : NAN)
           << "), " << fmt(secs) << " s";
    return {6, complete && monotone && order >= tol::kLimitOrder && secs < tol::kLimitSeconds, detail.str()};
}

Line criterion7() {
    const double eps = 0.2;
    std::vector<double> times;
    for (int k = 1; k <= 40; ++k) times.push_back(0.1 * k * eps * eps);

    const PhaseSpace bgk_ps = build_phase_space(4, 64, 8.0, PotentialSpec{});
    DistributionField psi(bgk_ps);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    for (double& x : psi.values()) x = n(rng);
    const LayerTrajectory bgk = solve_layer(psi, eps, CollisionKind::Bgk, times, bgk_ps.velocity);
    const double n0 = norm_dm(bgk.psi.front(), bgk_ps.measure);
    double bgk_err = 0.0;
    for (std::size_t k = 0; k < bgk.times.size(); ++k) {
        const double expected = std::exp(-bgk.times[k] / (eps * eps));
        bgk_err = std::max(bgk_err, std::abs(norm_dm(bgk.psi[k], bgk_ps.measure) / n0 - expected));
    }

    const PhaseSpace fp_ps = build_phase_space(4, 128, 8.0, PotentialSpec{});
    DistributionField v(fp_ps);
    for (std::size_t i = 0; i < fp_ps.nx(); ++i)
        for (std::size_t j = 0; j < fp_ps.nv(); ++j) v(i, j) = fp_ps.velocity.nodes[j];
    const LayerTrajectory fp = solve_layer(v, eps, CollisionKind::FokkerPlanck, times, fp_ps.velocity);
    const double v0 = norm_dm(fp.psi.front(), fp_ps.measure);
    double fp_err = 0.0;
    std::vector<double> weighted;
    for (std::size_t k = 0; k < fp.times.size(); ++k) {
        const double expected = std::exp(-fp.times[k] / (eps * eps));
        fp_err = std::max(fp_err, std::abs(norm_dm(fp.psi[k], fp_ps.measure) / v0 - expected) / expected);
        weighted.push_back(weighted_norm(fp.psi[k], fp_ps));
    }
    const RateFit c0 = fit_decay_rate(fp.times, weighted, {fp.times.front(), fp.times.back()});
    // Rate in units of 1/eps^2.
    const double c0_scaled = c0.lambda * eps * eps;
    return {7, bgk_err <= tol::kBgkLayer && fp_err <= tol::kFpLayer && c0_scaled > 0.0,
            "bgk max error " + fmt(bgk_err) + ", fp max relative error " + fmt(fp_err) + ", fitted c0 " +
                fmt(c0_scaled)};
}

double manufactured_error(int nx) {
    const PhaseSpace ps = build_phase_space(nx, 8, 4.0, PotentialSpec{});
    MacroField s{std::vector<double>(ps.nx())};
    for (std::size_t i = 0; i < ps.nx(); ++i) s.values[i] = (1.0 + kPi * kPi) * std::cos(kPi * ps.space.centers[i]);
    const EllipticSolution sol = solve_robin(s, RobinCoefficients::uniform(0.0), ps);
    double e = 0.0;
    for (std::size_t i = 0; i < ps.nx(); ++i) e = std::max(e, std::abs(sol.u[i] - std::cos(kPi * ps.space.centers[i])));
    return e;
}

Line criterion8() {
    const double e1 = manufactured_error(32), e2 = manufactured_error(64), e3 = manufactured_error(128);
    const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
    bool pass = o1 >= tol::kEllipticLo && o1 <= tol::kEllipticHi && o2 >= tol::kEllipticLo && o2 <= tol::kEllipticHi;

    const PhaseSpace ps = build_phase_space(64, 8, 4.0, PotentialSpec{PotentialKind::Cosine, 0.5, {}, {}});
    std::mt19937_64 rng(808);
    std::normal_distribution<double> n(0.0, 1.0);
    double lower = 0.0, identity = 0.0;
    for (const RobinCoefficients& c : {RobinCoefficients::uniform(0.0), RobinCoefficients::uniform(1.0),
                                       RobinCoefficients::uniform(1e3), RobinCoefficients::homogeneous_dirichlet()}) {
        for (int k = 0; k < 100; ++k) {
            MacroField s{std::vector<double>(ps.nx())};
            for (double& x : s.values) x = n(rng);
            const EllipticSolution sol = solve_robin(s, c, ps);
            const double ss = norm_x(s, ps.measure);
            MacroField diff = s;
            for (std::size_t i = 0; i < ps.nx(); ++i) diff.values[i] -= sol.u[i];
            const double pairing = inner_x(diff, s, ps.measure);
            const double g2 = sol.norm_gradient * sol.norm_gradient;
            const double b2 = sol.norm_boundary * sol.norm_boundary;
            const double scale = ss * ss;
            lower = std::max(lower, (g2 + b2 - pairing) / scale);
            identity = std::max(identity, std::abs(pairing - (ss * ss - sol.norm_u * sol.norm_u - g2 - b2)) / scale);
        }
    }
    pass = pass && lower <= tol::kElliptic && identity <= tol::kElliptic;
    return {8, pass, "orders " + fmt(o1) + ", " + fmt(o2) + "; lower-bound violation " + fmt(lower) +
                         ", identity residual " + fmt(identity) + " over 400 sources"};
}

Line criterion9(const std::vector<const Trajectory*>& runs) {
    double lo = INFINITY, hi = 0.0, increase = 0.0;
    for (const Trajectory* t : runs) {
        const double e0 = t->records.front().entropy;
        for (std::size_t k = 0; k < t->records.size(); ++k) {
            const auto& r = t->records[k];
            const double d2 = r.norm_f_minus_mc * r.norm_f_minus_mc;
            if (d2 > 0.0) {
                lo = std::min(lo, r.entropy / d2);
                hi = std::max(hi, r.entropy / d2);
            }
            if (k > 0) increase = std::max(increase, (r.entropy - t->records[k - 1].entropy) / e0);
        }
    }
    return {9, lo >= tol::kEntropyLo && hi <= tol::kEntropyHi && increase <= tol::kEntropySlack,
            std::to_string(runs.size()) + " runs, E/||f-Mc||^2 in [" + fmt(lo) + ", " + fmt(hi) +
                "], worst relative increase " + fmt(increase)};
}

double eigen_error(int nv, bool quadratic) {
    const VelocityGrid g = build_velocity_grid(nv, 8.0);
    DistributionField f(1, g.size());
    for (std::size_t j = 0; j < g.size(); ++j) f(0, j) = quadratic ? g.nodes[j] * g.nodes[j] - 1.0 : g.nodes[j];
    const DistributionField lf = apply_fp(f, g);
    double e = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (std::abs(g.nodes[j]) > 4.0) continue;
        const double d = lf(0, j) + (quadratic ? 2.0 : 1.0) * f(0, j);
        e += g.weights[j] * d * d;
    }
    return std::sqrt(e);
}

Line criterion10() {
    const PhaseSpace ps = build_phase_space(4, 64, 8.0, PotentialSpec{PotentialKind::Linear, 0.5, {}, {}});
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double moment = 0.0, positive = 0.0;
    for (int k = 0; k < 1000; ++k) {
        DistributionField f(ps);
        for (double& x : f.values()) x = u(rng);
        const double n2 = inner_dm(f, f, ps.measure);
        for (CollisionKind kind : {CollisionKind::Bgk, CollisionKind::FokkerPlanck}) {
            const DistributionField lf = apply_collision(f, kind, ps.velocity);
            for (double m : moment0(lf, ps.velocity).values) moment = std::max(moment, std::abs(m));
            positive = std::max(positive, inner_dm(lf, f, ps.measure) / n2);
        }
    }
    double order = INFINITY;
    for (bool q : {false, true}) {
        const double a = eigen_error(32, q), b = eigen_error(64, q), c = eigen_error(128, q);
        order = std::min({order, std::log2(a / b), std::log2(b / c)});
    }
    return {10, moment <= tol::kMoment && positive <= tol::kDissipative && order >= tol::kEigenOrder,
            "max |<Lf>| " + fmt(moment) + ", max (Lf,f)/||f||^2 " + fmt(positive) + " over 1000 fields, eigen order " +
                fmt(order)};
}

}  // namespace

int main() {
    std::vector<Line> lines;
    lines.push_back(criterion1());

    const auto ledger = ledger_runs();
    lines.push_back(criterion2(ledger));

    const auto sweep_start = Clock::now();
    std::map<double, TimedRun> sweep;
    for (double eps : {1.0, 0.5, 0.25, 0.1}) sweep[eps] = timed(base_config(eps, CollisionKind::Bgk, 1.0, 0.0, 0.0));
    const double sweep_seconds = seconds_since(sweep_start);

    TimedRun mixed = timed(base_config(0.5, CollisionKind::FokkerPlanck, 0.4, 0.6, 0.5));
    std::vector<const Trajectory*> conservative{&mixed.traj};
    for (const auto& c : ledger) conservative.push_back(&c.run.traj);
    for (const auto& [eps, r] : sweep) conservative.push_back(&r.traj);
    lines.push_back(criterion3(conservative));

    std::vector<std::pair<std::string, const Trajectory*>> sweep_group;
    for (auto it = sweep.rbegin(); it != sweep.rend(); ++it) sweep_group.emplace_back("eps=" + fmt(it->first), &it->second.traj);
    Line c4 = rate_line(4, sweep_group, nullptr);
    c4.pass = c4.pass && sweep_seconds < tol::kSweepSeconds;
    c4.detail += ", " + fmt(sweep_seconds) + " s";
    lines.push_back(c4);

    std::map<std::string, TimedRun> open;
    for (auto [alpha, beta] : {std::pair{0.0, 0.0}, {0.3, 0.3}})
        for (double eps : {1.0, 0.25}) {
            std::ostringstream key;
            key << "(" << alpha << "," << beta << ") eps=" << eps;
            open[key.str()] = timed(base_config(eps, CollisionKind::Bgk, alpha, beta, 0.0));
        }
    Line c5{5, true, ""};
    for (const char* walls : {"(0,0)", "(0.3,0.3)"}) {
        std::vector<std::pair<std::string, const Trajectory*>> group;
        for (const auto& [key, r] : open)
            if (key.rfind(walls, 0) == 0) group.emplace_back(key, &r.traj);
        const Line l = rate_line(5, group, nullptr);
        c5.pass = c5.pass && l.pass;
        c5.detail += (c5.detail.empty() ? "" : " | ") + l.detail;
    }
    lines.push_back(c5);

    lines.push_back(criterion6());
    lines.push_back(criterion7());
    lines.push_back(criterion8());

    std::vector<const Trajectory*> entropy_runs;
    for (const auto& [eps, r] : sweep) entropy_runs.push_back(&r.traj);
    for (const auto& [key, r] : open) entropy_runs.push_back(&r.traj);
    lines.push_back(criterion9(entropy_runs));
    lines.push_back(criterion10());

    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.id < b.id; });
    int failures = 0;
    for (const Line& l : lines) {
        std::cout << (l.pass ? "PASS" : "FAIL") << " criterion " << l.id << ": " << l.detail << '\n';
        failures += l.pass ? 0 : 1;
    }
    std::cout << (lines.size() - failures) << '/' << lines.size() << " criteria passed\n";
    return failures == 0 ? 0 : 1;
}
