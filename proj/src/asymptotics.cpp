#include "kinslab/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "kinslab/errors.hpp"
#include "kinslab/tridiagonal.hpp"

namespace kinslab {

namespace {

void require_times(const std::vector<double>& times, const char* where) {
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k]) || times[k] < 0.0 || (k > 0 && !(times[k] > times[k - 1]))) {
            throw ContractViolation(std::string(where) + ": sample times must be finite, non-negative and increasing");
        }
    }
}

std::vector<double> with_origin(const std::vector<double>& times) {
    std::vector<double> out;
    out.reserve(times.size() + 1);
    if (times.empty() || times.front() > 0.0) out.push_back(0.0);
    out.insert(out.end(), times.begin(), times.end());
    return out;
}

}  // namespace

MacroField ParabolicTrajectory::at(double t) const {
    if (times.empty()) throw ContractViolation("ParabolicTrajectory::at: empty trajectory");
    if (t <= times.front()) return density.front();
    if (t >= times.back()) return density.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    const std::size_t lo = hi - 1;
    if (t == times[lo]) return density[lo];
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    MacroField out{density[lo].values};
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.values[i] = (1.0 - w) * density[lo].values[i] + w * density[hi].values[i];
    }
    return out;
}

double parabolic_mass(const MacroField& rho, const MeasureWeights& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) s += m.spatial[i] * rho.values[i];
    return s;
}

ParabolicTrajectory solve_parabolic(const MacroField& rho_in, const PhaseSpace& ps,
                                    const std::vector<double>& sample_times) {
    const std::size_t n = ps.nx();
    if (rho_in.size() != n) throw ContractViolation("solve_parabolic: shape mismatch");
    for (double v : rho_in.values) {
        if (!std::isfinite(v)) throw NumericalError("solve_parabolic: non-finite initial density");
    }
    require_times(sample_times, "solve_parabolic");
    const double dx = ps.space.dx;

    // Row i of A rho: (E_{i+1/2}(rho_{i+1} - rho_i) - E_{i-1/2}(rho_i - rho_{i-1})) / (e_i dx^2),
    // with the wall fluxes set to zero.
    std::vector<double> lo(n, 0.0), up(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double volume = ps.measure.spatial[i] * dx;
        if (i > 0) lo[i] = std::exp(-ps.potential.face[i]) / volume;
        if (i + 1 < n) up[i] = std::exp(-ps.potential.face[i + 1]) / volume;
    }

    ParabolicTrajectory traj;
    traj.dx = dx;
    traj.times = with_origin(sample_times);
    traj.density.reserve(traj.times.size());
    traj.density.push_back(rho_in);

    TridiagonalSolver thomas(n);
    std::vector<double> a(n), b(n), c(n), rhs(n), next(n);
    std::vector<double> rho = rho_in.values;
    const double dt_max = dx * dx;
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        const double span = traj.times[k] - traj.times[k - 1];
        const auto steps = static_cast<std::size_t>(std::ceil(span / dt_max - 1e-12));
        const double h = span / static_cast<double>(steps);
        traj.dt = std::max(traj.dt, h);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = -0.5 * h * lo[i];
            c[i] = -0.5 * h * up[i];
            b[i] = 1.0 + 0.5 * h * (lo[i] + up[i]);
        }
        for (std::size_t s = 0; s < steps; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                double flux = -(lo[i] + up[i]) * rho[i];
                if (i > 0) flux += lo[i] * rho[i - 1];
                if (i + 1 < n) flux += up[i] * rho[i + 1];
                rhs[i] = rho[i] + 0.5 * h * flux;
            }
            thomas.solve(a, b, c, rhs, next);
            rho.swap(next);
            ++traj.steps;
        }
        traj.density.push_back(MacroField{rho});
    }
    return traj;
}

LayerTrajectory solve_layer(const DistributionField& psi_in, double epsilon, CollisionKind kind,
                            const std::vector<double>& times, const VelocityGrid& vgrid,
                            double substep_fraction) {
    if (psi_in.nv() != vgrid.size()) throw ContractViolation("solve_layer: shape mismatch");
    if (!(epsilon > 0.0)) throw ContractViolation("solve_layer: epsilon must be positive");
    if (!(substep_fraction > 0.0 && substep_fraction <= 0.1)) {
        throw ContractViolation("solve_layer: sub-step fraction must lie in (0, 0.1]");
    }
    require_times(times, "solve_layer");
    if (!psi_in.all_finite()) throw NumericalError("solve_layer: non-finite initial layer");

    DistributionField psi = psi_in;
    const MacroField mean = moment0(psi, vgrid);
    double magnitude = 0.0;
    for (std::size_t i = 0; i < psi.nx(); ++i) {
        auto row = psi.cell(i);
        for (double& x : row) {
            magnitude = std::max(magnitude, std::abs(x));
            x -= mean.values[i];
        }
    }
    const MacroField residual = moment0(psi, vgrid);
    for (double r : residual.values) {
        if (std::abs(r) > 1e-13 * (1.0 + magnitude)) {
            throw ContractViolation("solve_layer: initial layer keeps a non-zero mean after projection");
        }
    }

    LayerTrajectory traj;
    traj.kind = kind;
    traj.epsilon = epsilon;
    traj.times = with_origin(times);
    psi.set_time(0.0);
    traj.psi.push_back(psi);
    const double eps2 = epsilon * epsilon;

    if (kind == CollisionKind::Bgk) {
        for (std::size_t k = 1; k < traj.times.size(); ++k) {
            DistributionField g = traj.psi.front();
            const double decay = std::exp(-traj.times[k] / eps2);
            for (double& x : g.values()) x *= decay;
            g.set_time(traj.times[k]);
            traj.psi.push_back(std::move(g));
        }
        return traj;
    }

    CollisionSolver solver(vgrid, kind);
    const double h_max = substep_fraction * eps2;
    for (std::size_t k = 1; k < traj.times.size(); ++k) {
        const double span = traj.times[k] - traj.times[k - 1];
        const auto steps = static_cast<std::size_t>(std::ceil(span / h_max - 1e-12));
        const double h = span / static_cast<double>(steps);
        traj.substep = std::max(traj.substep, h);
        for (std::size_t s = 0; s < steps; ++s) solver.solve(psi, h / eps2);
        psi.set_time(traj.times[k]);
        traj.psi.push_back(psi);
    }
    return traj;
}

double weighted_norm(const DistributionField& psi, const PhaseSpace& ps) {
    require_shape(psi, ps, "weighted_norm");
    double s = 0.0;
    for (std::size_t i = 0; i < psi.nx(); ++i) {
        const auto row = psi.cell(i);
        double cell = 0.0;
        for (std::size_t j = 0; j < psi.nv(); ++j) {
            const double g = (1.0 + std::abs(ps.velocity.nodes[j])) * row[j];
            cell += ps.measure.velocity[j] * g * g;
        }
        s += ps.measure.spatial[i] * cell;
    }
    return std::sqrt(s);
}

LayerLedger layer_ledger(const LayerTrajectory& layer, const PhaseSpace& ps) {
    if (layer.psi.empty()) throw ContractViolation("layer_ledger: empty trajectory");
    std::vector<double> sq(layer.psi.size());
    for (std::size_t k = 0; k < sq.size(); ++k) {
        const double n = norm_dm(layer.psi[k], ps.measure);
        sq[k] = n * n;
    }
    double integral = 0.0;
    for (std::size_t k = 1; k < sq.size(); ++k) {
        integral += 0.5 * (layer.times[k] - layer.times[k - 1]) * (sq[k] + sq[k - 1]);
    }
    LayerLedger r;
    r.rhs = sq.front();
    r.lhs = sq.back() + 2.0 / (layer.epsilon * layer.epsilon) * integral;
    r.holds = r.lhs <= r.rhs * (1.0 + 1e-3);
    return r;
}

double layer_time(double epsilon) {
    return epsilon * epsilon * std::abs(std::log(std::sqrt(epsilon)));
}

DiffusionGap diffusion_gap(const std::vector<DistributionField>& kinetic,
                           const ParabolicTrajectory& parabolic, const LayerTrajectory* layer,
                           double epsilon, const PhaseSpace& ps) {
    if (kinetic.empty()) throw ContractViolation("diffusion_gap: no kinetic samples");
    if (parabolic.density.empty() || parabolic.density.front().size() != ps.nx()) {
        throw ContractViolation("diffusion_gap: parabolic trajectory on a different mesh");
    }
    if (layer && layer->psi.size() != kinetic.size()) {
        throw ContractViolation("diffusion_gap: layer samples do not match kinetic samples");
    }
    DiffusionGap gap;
    gap.t_eps = layer_time(epsilon);
    gap.layer_used = layer != nullptr;
    gap.samples = kinetic.size();

    std::vector<double> sq(kinetic.size());
    double prev_t = 0.0;
    for (std::size_t k = 0; k < kinetic.size(); ++k) {
        const DistributionField& f = kinetic[k];
        require_shape(f, ps, "diffusion_gap");
        const double t = f.time();
        if (k > 0 && !(t > prev_t)) throw ContractViolation("diffusion_gap: kinetic times must increase");
        prev_t = t;
        if (!std::binary_search(parabolic.times.begin(), parabolic.times.end(), t)) gap.interpolated = true;
        const MacroField rho = parabolic.at(t);
        const DistributionField* psi = nullptr;
        if (layer) {
            psi = &layer->psi[k];
            if (!psi->same_shape(f) || std::abs(layer->times[k] - t) > 1e-12 * (1.0 + t)) {
                throw ContractViolation("diffusion_gap: layer samples do not match kinetic samples");
            }
        }
        double d2 = 0.0, d2_layer = 0.0;
        for (std::size_t i = 0; i < f.nx(); ++i) {
            const auto row = f.cell(i);
            double cell = 0.0, cell_layer = 0.0;
            for (std::size_t j = 0; j < f.nv(); ++j) {
                const double d = row[j] - rho.values[i];
                cell += ps.measure.velocity[j] * d * d;
                if (psi) {
                    const double e = d - (*psi)(i, j);
                    cell_layer += ps.measure.velocity[j] * e * e;
                }
            }
            d2 += ps.measure.spatial[i] * cell;
            d2_layer += ps.measure.spatial[i] * cell_layer;
        }
        sq[k] = d2;
        const double norm = std::sqrt(d2);
        gap.sup_all = std::max(gap.sup_all, norm);
        if (t >= gap.t_eps) gap.sup_after_layer = std::max(gap.sup_after_layer, norm);
        gap.sup_with_layer = std::max(gap.sup_with_layer, psi ? std::sqrt(d2_layer) : norm);
    }
    double integral = 0.0;
    for (std::size_t k = 1; k < sq.size(); ++k) {
        integral += 0.5 * (kinetic[k].time() - kinetic[k - 1].time()) * (sq[k] + sq[k - 1]);
    }
    gap.l2_time = std::sqrt(integral);
    return gap;
}

DistributionField restrict_to_coarse(const DistributionField& fine, const MeasureWeights& fine_measure) {
    if (fine.nx() % 2 != 0 || fine_measure.nx() != fine.nx()) {
        throw ContractViolation("restrict_to_coarse: fine mesh must have an even cell count");
    }
    DistributionField coarse(fine.nx() / 2, fine.nv());
    coarse.set_time(fine.time());
    for (std::size_t i = 0; i < coarse.nx(); ++i) {
        const double a = fine_measure.spatial[2 * i], b = fine_measure.spatial[2 * i + 1];
        for (std::size_t j = 0; j < fine.nv(); ++j) {
            coarse(i, j) = (a * fine(2 * i, j) + b * fine(2 * i + 1, j)) / (a + b);
        }
    }
    return coarse;
}

DistributionField richardson(const DistributionField& fine_restricted, const DistributionField& coarse) {
    if (!fine_restricted.same_shape(coarse)) throw ContractViolation("richardson: shape mismatch");
    DistributionField out = coarse;
    for (std::size_t k = 0; k < out.size(); ++k) {
        out.values()[k] = 2.0 * fine_restricted.values()[k] - coarse.values()[k];
    }
    return out;
}

}  // namespace kinslab
