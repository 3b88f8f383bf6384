#include "kinslab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kinslab/elliptic.hpp"
#include "kinslab/errors.hpp"

namespace kinslab {

std::string to_string(InitialKind kind) {
    switch (kind) {
        case InitialKind::Cosine: return "cosine";
        case InitialKind::Bump: return "bump";
        case InitialKind::Shifted: return "shifted";
        case InitialKind::Constant: return "constant";
    }
    return "cosine";
}

InitialKind parse_initial_kind(const std::string& name) {
    if (name == "cosine") return InitialKind::Cosine;
    if (name == "bump") return InitialKind::Bump;
    if (name == "shifted") return InitialKind::Shifted;
    if (name == "constant") return InitialKind::Constant;
    throw ConfigError("initial.kind: unknown preset '" + name + "' (cosine|bump|shifted|constant)");
}

bool well_prepared(const InitialSpec& spec) { return spec.kind != InitialKind::Shifted; }

DistributionField make_initial(const InitialSpec& spec, const PhaseSpace& ps) {
    DistributionField f(ps);
    const auto& v = ps.velocity.nodes;
    for (std::size_t i = 0; i < ps.nx(); ++i) {
        const double x = ps.space.centers[i];
        const double c = std::cos(std::numbers::pi * x);
        for (std::size_t j = 0; j < ps.nv(); ++j) {
            double value = 0.0;
            switch (spec.kind) {
                case InitialKind::Cosine: value = 1.0 + spec.amplitude * c; break;
                case InitialKind::Bump: {
                    const double z = (x - spec.center) / spec.width;
                    value = std::exp(-z * z);
                    break;
                }
                case InitialKind::Shifted: value = 1.0 + spec.amplitude * v[j] * c; break;
                case InitialKind::Constant: value = spec.value; break;
            }
            f(i, j) = value;
        }
    }
    return f;
}

void SimConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("model.epsilon: must lie in (0,1]");
    if (nx < 4) throw ConfigError("grids.nx: must be at least 4");
    if (nv < 8 || nv % 2 != 0) throw ConfigError("grids.nv: must be even and at least 8");
    if (!(vmax >= 4.0)) throw ConfigError("grids.vmax: must be at least 4");
    boundary.validate();
    if (!(final_time > 0.0)) throw ConfigError("time.final: must be positive");
    if (!(cfl > 0.0 && cfl < 1.0)) throw ConfigError("time.cfl: must lie in (0,1)");
    if (!(record_interval > 0.0)) throw ConfigError("time.record_interval: must be positive");
    if (initial.kind == InitialKind::Bump && !(initial.width > 0.0)) {
        throw ConfigError("initial.width: must be positive");
    }
    if (!std::isfinite(initial.amplitude) || !std::isfinite(initial.value) ||
        !std::isfinite(initial.center)) {
        throw ConfigError("initial: parameters must be finite");
    }
}

PhaseSpace SimConfig::phase_space() const { return build_phase_space(nx, nv, vmax, potential); }

double stable_dt(const SimConfig& cfg, const PhaseSpace& ps) {
    return cfg.cfl * cfg.epsilon /
           (ps.velocity.vmax / ps.space.dx + ps.potential.lipschitz / ps.velocity.dv);
}

double stable_dt(const SimConfig& cfg) { return stable_dt(cfg, cfg.phase_space()); }

TransportOperator::TransportOperator(const PhaseSpace& ps, const BoundaryConfig& boundary,
                                     double epsilon)
    : ps_(&ps), boundary_(boundary), epsilon_(epsilon) {
    if (!(epsilon > 0.0)) throw ContractViolation("TransportOperator: epsilon must be positive");
    boundary_.validate();
    const std::size_t nx = ps.nx(), nv = ps.nv();
    face_weight_.resize(nx + 1);
    for (std::size_t k = 0; k <= nx; ++k) face_weight_[k] = std::exp(-ps.potential.face[k]);
    force_.resize(nx);
    for (std::size_t i = 0; i < nx; ++i) force_[i] = face_weight_[i + 1] - face_weight_[i];
    const auto& vg = ps.velocity;
    velocity_flux_.resize(nv);
    for (std::size_t j = 0; j < nv; ++j) velocity_flux_[j] = vg.nodes[j] * vg.weights[j];

    // Outflow per node: through the downwind x face and the downwind v face.
    for (std::size_t i = 0; i < nx; ++i) {
        const double volume = ps.measure.spatial[i];
        for (std::size_t j = 0; j < nv; ++j) {
            const double v = vg.nodes[j];
            double out = std::abs(v) * vg.weights[j] * face_weight_[v > 0.0 ? i + 1 : i];
            if (force_[i] > 0.0 && j + 1 < nv) out += force_[i] * vg.force_face_weight[j];
            if (force_[i] < 0.0 && j > 0) out += -force_[i] * vg.force_face_weight[j - 1];
            max_rate_ = std::max(max_rate_, out / (epsilon * volume * vg.weights[j]));
        }
    }
}

void TransportOperator::apply(const DistributionField& f, DistributionField& out) const {
    const PhaseSpace& ps = *ps_;
    require_shape(f, ps, "transport");
    if (!out.same_shape(f)) out = DistributionField(ps);
    const std::size_t nx = ps.nx(), nv = ps.nv();
    const auto& vg = ps.velocity;
    const auto& mu_face = vg.force_face_weight;
    const WallTrace trace = closed_trace(f, boundary_, vg);
    const auto& left = trace.at(Wall::Left);
    const auto& right = trace.at(Wall::Right);

    for (std::size_t i = 0; i < nx; ++i) {
        const auto fi = f.cell(i);
        auto oi = out.cell(i);
        const double scale = -1.0 / (epsilon_ * ps.measure.spatial[i]);
        const double e_in = face_weight_[i], e_out = face_weight_[i + 1];
        const double d = force_[i];
        for (std::size_t j = 0; j < nv; ++j) {
            const bool rightward = vg.nodes[j] > 0.0;
            // Upwind values on the two x faces of cell i.
            double f_lo, f_hi;
            if (rightward) {
                f_lo = i == 0 ? left[j] : f(i - 1, j);
                f_hi = fi[j];
            } else {
                f_lo = fi[j];
                f_hi = i + 1 == nx ? right[j] : f(i + 1, j);
            }
            const double x_div = velocity_flux_[j] * (e_out * f_hi - e_in * f_lo);
            // v faces j -+ 1/2; the outer ones carry no flux.
            double h_hi = 0.0, h_lo = 0.0;
            if (j + 1 < nv) h_hi = d * mu_face[j] * (d > 0.0 ? fi[j] : fi[j + 1]);
            if (j > 0) h_lo = d * mu_face[j - 1] * (d > 0.0 ? fi[j - 1] : fi[j]);
            oi[j] = scale * (x_div + h_hi - h_lo) / vg.weights[j];
        }
    }
}

DistributionField TransportOperator::apply(const DistributionField& f) const {
    DistributionField out(*ps_);
    apply(f, out);
    out.set_time(f.time());
    return out;
}

DistributionField transport_rhs(const DistributionField& f, const SimConfig& cfg, const PhaseSpace& ps) {
    return TransportOperator(ps, cfg.boundary, cfg.epsilon).apply(f);
}

ImexStepper::ImexStepper(const PhaseSpace& ps, const SimConfig& cfg)
    : transport_(ps, cfg.boundary, cfg.epsilon),
      collision_(ps.velocity, cfg.collision),
      rate_(ps),
      epsilon_(cfg.epsilon) {}

void ImexStepper::step(DistributionField& f, double dt) {
    if (!(dt > 0.0)) throw ContractViolation("step: dt must be positive");
    if (dt * transport_.max_rate() > 1.0 + 1e-12) {
        throw ContractViolation("step: dt = " + std::to_string(dt) + " exceeds the transport bound " +
                                std::to_string(1.0 / transport_.max_rate()));
    }
    transport_.apply(f, rate_);
    auto& values = f.values();
    const auto& rate = rate_.values();
    for (std::size_t k = 0; k < values.size(); ++k) values[k] += dt * rate[k];
    collision_.solve(f, dt / (epsilon_ * epsilon_));
    f.set_time(f.time() + dt);
}

DistributionField step_imex(const DistributionField& f, double dt, const SimConfig& cfg,
                            const PhaseSpace& ps) {
    DistributionField g = f;
    ImexStepper(ps, cfg).step(g, dt);
    return g;
}

Trajectory run_simulation(const SimConfig& cfg) {
    cfg.validate();
    const PhaseSpace ps = cfg.phase_space();
    return run_simulation(cfg, ps);
}

Trajectory run_simulation(const SimConfig& cfg, const PhaseSpace& ps,
                          std::optional<DistributionField> initial) {
    cfg.validate();
    DistributionField f = initial ? std::move(*initial) : make_initial(cfg.initial, ps);
    require_shape(f, ps, "run_simulation");
    if (!f.all_finite()) throw NumericalError("run_simulation: non-finite initial datum");
    f.set_time(0.0);

    ImexStepper stepper(ps, cfg);
    const double dt_max = std::min(stable_dt(cfg, ps), 1.0 / stepper.transport().max_rate());
    const auto records = static_cast<std::size_t>(std::ceil(cfg.final_time / cfg.record_interval - 1e-9));
    const double interval = cfg.final_time / static_cast<double>(records);
    const auto substeps = static_cast<std::size_t>(std::ceil(interval / dt_max - 1e-12));
    const double dt = interval / static_cast<double>(substeps);

    Trajectory traj;
    traj.epsilon = cfg.epsilon;
    traj.dt = dt;
    traj.initial_mass = initial_mass(f, ps.measure);
    const double norm_in = norm_dm(f, ps.measure);
    traj.initial_norm_squared = norm_in * norm_in;

    const EntropyAux aux0 = entropy_aux(f, cfg.boundary, ps, traj.initial_mass);
    traj.reference_mass = aux0.reference_mass;
    traj.kappa = adaptive_kappa(distance_squared(f, aux0.reference_mass, ps.measure),
                                entropy_cross_term(f, aux0.solution, ps), cfg.epsilon);

    auto dissipation_rates = [&](const DistributionField& g) {
        const double perp2 = perp_norm_squared(g, ps);
        const double bd = boundary_dissipation(closed_trace(g, cfg.boundary, ps.velocity), ps.measure);
        return std::pair{perp2, bd};
    };

    auto record = [&](const DistributionField& g, double int_perp, double int_bd) {
        traj.records.push_back(assemble_record(g, ps, cfg.boundary, cfg.epsilon, traj.kappa,
                                               traj.initial_mass, int_perp, int_bd));
        if (cfg.keep_snapshots) traj.snapshots.push_back(g);
    };

    auto [perp_prev, bd_prev] = dissipation_rates(f);
    double int_perp = 0.0, int_bd = 0.0;
    // Coarse sums use every other state with step 2 dt.
    double coarse_perp = 0.0, coarse_bd = 0.0;
    double perp_anchor = perp_prev, bd_anchor = bd_prev;
    record(f, 0.0, 0.0);

    std::size_t step = 0;
    for (std::size_t r = 1; r <= records; ++r) {
        for (std::size_t s = 0; s < substeps; ++s) {
            stepper.step(f, dt);
            ++step;
            const auto [perp_now, bd_now] = dissipation_rates(f);
            if (!std::isfinite(perp_now) || !std::isfinite(bd_now)) {
                throw NumericalError("run_simulation: non-finite state at step " + std::to_string(step) +
                                     " (t = " + std::to_string(f.time()) + ")");
            }
            int_perp += 0.5 * dt * (perp_prev + perp_now);
            int_bd += 0.5 * dt * (bd_prev + bd_now);
            if (step % 2 == 0) {
                coarse_perp += dt * (perp_anchor + perp_now);
                coarse_bd += dt * (bd_anchor + bd_now);
                perp_anchor = perp_now;
                bd_anchor = bd_now;
            }
            perp_prev = perp_now;
            bd_prev = bd_now;
        }
        f.set_time(static_cast<double>(r) * interval);
        record(f, int_perp, int_bd);
    }
    if (step % 2 == 1) {
        coarse_perp += 0.5 * dt * (perp_anchor + perp_prev);
        coarse_bd += 0.5 * dt * (bd_anchor + bd_prev);
    }
    traj.steps = step;
    traj.coarse_int_fperp2 = coarse_perp;
    traj.coarse_int_boundary = coarse_bd;
    traj.coarse_end_time = f.time();
    traj.final_field = std::move(f);
    return traj;
}

}  // namespace kinslab
