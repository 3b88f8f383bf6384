#include "kinslab/grids.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kinslab/errors.hpp"

namespace kinslab {

const char* wall_name(Wall w) { return w == Wall::Left ? "left" : "right"; }

double gaussian_density(double v) {
    return std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
}

VelocityGrid build_velocity_grid(int nv, double vmax) {
    if (nv < 8 || nv % 2 != 0) {
        throw ConfigError("velocity grid: N_v must be an even integer >= 8 (got " +
                          std::to_string(nv) + ")");
    }
    if (!(vmax >= 4.0) || !std::isfinite(vmax)) {
        throw ConfigError("velocity grid: V_max must be >= 4");
    }
    VelocityGrid g;
    const auto n = static_cast<std::size_t>(nv);
    g.vmax = vmax;
    g.dv = 2.0 * vmax / nv;
    g.nodes.resize(n);
    g.weights.resize(n);
    const std::size_t half = n / 2;
    // Fill the positive half and mirror, so v -> -v is an exact permutation.
    for (std::size_t k = 0; k < half; ++k) {
        const double v = (static_cast<double>(k) + 0.5) * g.dv;
        const double w = gaussian_density(v) * g.dv;
        g.nodes[half + k] = v;
        g.nodes[half - 1 - k] = -v;
        g.weights[half + k] = w;
        g.weights[half - 1 - k] = w;
    }

    // Sum small-to-large in symmetric pairs so the positive and negative halves
    // see identical rounding.
    double z = 0.0, s_plus = 0.0, m2 = 0.0;
    for (std::size_t k = half; k-- > 0;) {
        const double w = g.weights[half + k];
        const double v = g.nodes[half + k];
        z += 2.0 * w;
        s_plus += w * v;
        m2 += 2.0 * w * v * v;
    }
    g.normalizer = z;
    g.outgoing_flux_sum = s_plus;
    g.normalization_error = std::abs(z - 1.0);
    g.second_moment_error = std::abs(m2 / z - 1.0);

    // Tail mass beyond the cutoff plus the aliasing error of the midpoint rule
    // for a Gaussian (Poisson summation), with a factor 2 margin.
    const double tail = std::erfc(vmax / std::sqrt(2.0));
    const double aliasing = 2.0 * std::exp(-2.0 * std::numbers::pi * std::numbers::pi / (g.dv * g.dv));
    g.tolerance = 2.0 * (tail + aliasing) + 1e-14;
    if (g.tolerance > 1e-2) {
        throw ConfigError("velocity grid: spacing dv = " + std::to_string(g.dv) +
                          " too coarse to resolve the Gaussian (increase N_v)");
    }
    if (g.normalization_error > g.tolerance) {
        throw NumericalError("velocity grid: |Z - 1| exceeds the declared tolerance");
    }

    g.face_density.resize(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        g.face_density[j] = gaussian_density(0.5 * (g.nodes[j] + g.nodes[j + 1]));
    }
    g.force_face_weight.assign(n - 1, 0.0);
    double partial = 0.0;
    for (std::size_t j = 0; j + 1 < half; ++j) {
        partial -= g.nodes[j] * g.weights[j];
        g.force_face_weight[j] = partial;
        g.force_face_weight[n - 2 - j] = partial;
    }
    // The face at v = 0.
    partial -= g.nodes[half - 1] * g.weights[half - 1];
    g.force_face_weight[half - 1] = partial;
    return g;
}

SpatialGrid build_spatial_grid(int nx) {
    if (nx < 4) throw ConfigError("spatial grid: N_x must be >= 4");
    SpatialGrid g;
    g.nx = static_cast<std::size_t>(nx);
    g.dx = 1.0 / nx;
    g.centers.resize(g.nx);
    for (std::size_t i = 0; i < g.nx; ++i) g.centers[i] = (static_cast<double>(i) + 0.5) * g.dx;
    return g;
}

std::string to_string(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::Zero: return "zero";
        case PotentialKind::Linear: return "linear";
        case PotentialKind::Cosine: return "cosine";
        case PotentialKind::Tabulated: return "table";
    }
    return "zero";
}

PotentialKind parse_potential_kind(const std::string& name) {
    if (name == "zero") return PotentialKind::Zero;
    if (name == "linear") return PotentialKind::Linear;
    if (name == "cosine") return PotentialKind::Cosine;
    if (name == "table" || name == "tabulated") return PotentialKind::Tabulated;
    throw ConfigError("potential.kind: unknown preset '" + name + "'");
}

namespace {

// Index k with table[k].x <= x <= table[k+1].x, clamped to the end segments.
std::size_t table_segment(const std::vector<std::pair<double, double>>& table, double x) {
    auto it = std::upper_bound(table.begin(), table.end(), x,
                               [](double value, const auto& p) { return value < p.first; });
    std::size_t k = it == table.begin() ? 0 : static_cast<std::size_t>(it - table.begin()) - 1;
    return std::min(k, table.size() - 2);
}

}  // namespace

double PotentialSpec::value(double x) const {
    switch (kind) {
        case PotentialKind::Zero: return 0.0;
        case PotentialKind::Linear: return amplitude * x;
        case PotentialKind::Cosine: return amplitude * std::cos(std::numbers::pi * x);
        case PotentialKind::Tabulated: {
            const std::size_t k = table_segment(table, x);
            const auto [x0, y0] = table[k];
            const auto [x1, y1] = table[k + 1];
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    }
    return 0.0;
}

double PotentialSpec::slope(double x) const {
    switch (kind) {
        case PotentialKind::Zero: return 0.0;
        case PotentialKind::Linear: return amplitude;
        case PotentialKind::Cosine:
            return -amplitude * std::numbers::pi * std::sin(std::numbers::pi * x);
        case PotentialKind::Tabulated: {
            const std::size_t k = table_segment(table, x);
            return (table[k + 1].second - table[k].second) / (table[k + 1].first - table[k].first);
        }
    }
    return 0.0;
}

PotentialSpec read_potential_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("potential.file: cannot open '" + path + "'");
    PotentialSpec spec;
    spec.kind = PotentialKind::Tabulated;
    spec.source = path;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream row(line);
        double x = 0.0, phi = 0.0;
        if (!(row >> x >> phi) || !std::isfinite(x) || !std::isfinite(phi)) {
            throw ConfigError("potential.file: malformed line " + std::to_string(lineno) +
                              " in '" + path + "'");
        }
        spec.table.emplace_back(x, phi);
    }
    if (spec.table.size() < 2) throw ConfigError("potential.file: need at least two samples");
    std::sort(spec.table.begin(), spec.table.end());
    for (std::size_t k = 1; k < spec.table.size(); ++k) {
        if (spec.table[k].first == spec.table[k - 1].first) {
            throw ConfigError("potential.file: duplicate abscissa in '" + path + "'");
        }
    }
    return spec;
}

Potential build_potential(const PotentialSpec& spec, const SpatialGrid& grid) {
    if (spec.kind == PotentialKind::Tabulated && spec.table.size() < 2) {
        throw ConfigError("potential: tabulated preset needs at least two samples");
    }
    Potential p;
    p.spec = spec;
    p.center.resize(grid.nx);
    p.face.resize(grid.nx + 1);
    p.face_slope.resize(grid.nx + 1);
    for (std::size_t i = 0; i < grid.nx; ++i) p.center[i] = spec.value(grid.centers[i]);
    for (std::size_t k = 0; k <= grid.nx; ++k) {
        p.face[k] = spec.value(grid.face(k));
        p.face_slope[k] = spec.slope(grid.face(k));
    }
    for (double s : p.face_slope) p.lipschitz = std::max(p.lipschitz, std::abs(s));
    for (double v : p.center) {
        if (!std::isfinite(v)) throw ConfigError("potential: non-finite value");
    }
    if (!std::isfinite(p.lipschitz)) throw ConfigError("potential: non-finite slope");
    return p;
}

double MeasureWeights::domain_weight() const {
    double s = 0.0;
    for (double w : spatial) s += w;
    return s;
}

MeasureWeights build_measure(const VelocityGrid& vgrid, const SpatialGrid& xgrid,
                             const Potential& potential) {
    MeasureWeights m;
    m.spatial.resize(xgrid.nx);
    for (std::size_t i = 0; i < xgrid.nx; ++i) m.spatial[i] = std::exp(-potential.center[i]) * xgrid.dx;
    m.velocity.resize(vgrid.size());
    for (std::size_t j = 0; j < vgrid.size(); ++j) m.velocity[j] = vgrid.weights[j] / vgrid.normalizer;
    m.velocity_nodes = vgrid.nodes;
    m.wall = {std::exp(-potential.at_wall(Wall::Left)), std::exp(-potential.at_wall(Wall::Right))};
    return m;
}

PhaseSpace build_phase_space(int nx, int nv, double vmax, const PotentialSpec& potential) {
    PhaseSpace ps;
    ps.velocity = build_velocity_grid(nv, vmax);
    ps.space = build_spatial_grid(nx);
    ps.potential = build_potential(potential, ps.space);
    ps.measure = build_measure(ps.velocity, ps.space, ps.potential);
    return ps;
}

double normal_velocity(Wall w, double v) { return outward_normal(w) * v; }

double outgoing_velocity(Wall w, double v) { return std::max(0.0, outward_normal(w) * v); }

double inner_boundary(const WallValues& f, const WallValues& g, const BoundaryWeight& weight,
                      const MeasureWeights& measure) {
    double total = 0.0;
    for (Wall w : kWalls) {
        const auto& fw = f[wall_index(w)];
        const auto& gw = g[wall_index(w)];
        if (fw.size() != measure.nv() || gw.size() != measure.nv()) {
            throw ContractViolation("inner_boundary: trace length does not match the velocity grid");
        }
        double s = 0.0;
        for (std::size_t j = 0; j < measure.nv(); ++j) {
            s += measure.velocity[j] * weight(w, measure.velocity_nodes[j]) * fw[j] * gw[j];
        }
        total += measure.wall[wall_index(w)] * s;
    }
    return total;
}

}  // namespace kinslab
