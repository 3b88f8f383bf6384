#include "kinslab/fields.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "kinslab/errors.hpp"

namespace kinslab {

bool DistributionField::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void require_shape(const DistributionField& f, const PhaseSpace& ps, const char* where) {
    if (f.nx() != ps.nx() || f.nv() != ps.nv()) {
        throw ContractViolation(std::string(where) + ": field shape does not match the grids");
    }
}

double inner_dm(const DistributionField& f, const DistributionField& g, const MeasureWeights& m) {
    if (!f.same_shape(g) || f.nx() != m.nx() || f.nv() != m.nv()) {
        throw ContractViolation("inner_dm: shape mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < f.nx(); ++i) {
        const auto fi = f.cell(i);
        const auto gi = g.cell(i);
        double s = 0.0;
        for (std::size_t j = 0; j < f.nv(); ++j) s += m.velocity[j] * fi[j] * gi[j];
        total += m.spatial[i] * s;
    }
    return total;
}

double norm_dm(const DistributionField& f, const MeasureWeights& m) {
    return std::sqrt(std::max(0.0, inner_dm(f, f, m)));
}

double inner_x(const MacroField& a, const MacroField& b, const MeasureWeights& m) {
    if (a.size() != m.nx() || b.size() != m.nx()) throw ContractViolation("inner_x: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += m.spatial[i] * a.values[i] * b.values[i];
    return s;
}

double norm_x(const MacroField& a, const MeasureWeights& m) {
    return std::sqrt(std::max(0.0, inner_x(a, a, m)));
}

MacroField moment0(const DistributionField& f, const VelocityGrid& vgrid) {
    if (f.nv() != vgrid.size()) throw ContractViolation("moment0: velocity size mismatch");
    MacroField rho{std::vector<double>(f.nx())};
    for (std::size_t i = 0; i < f.nx(); ++i) {
        const auto fi = f.cell(i);
        double s = 0.0;
        for (std::size_t j = 0; j < f.nv(); ++j) s += vgrid.weights[j] * fi[j];
        rho.values[i] = s / vgrid.normalizer;
    }
    return rho;
}

MacroField moment1(const DistributionField& f, const VelocityGrid& vgrid) {
    if (f.nv() != vgrid.size()) throw ContractViolation("moment1: velocity size mismatch");
    MacroField flux{std::vector<double>(f.nx())};
    for (std::size_t i = 0; i < f.nx(); ++i) {
        const auto fi = f.cell(i);
        double s = 0.0;
        for (std::size_t j = 0; j < f.nv(); ++j) s += vgrid.weights[j] * vgrid.nodes[j] * fi[j];
        flux.values[i] = s / vgrid.normalizer;
    }
    return flux;
}

DistributionField perp(const DistributionField& f, const VelocityGrid& vgrid) {
    const MacroField rho = moment0(f, vgrid);
    DistributionField out = f;
    for (std::size_t i = 0; i < f.nx(); ++i) {
        for (double& v : out.cell(i)) v -= rho.values[i];
    }
    return out;
}

double perp_norm_squared(const DistributionField& f, const PhaseSpace& ps) {
    const auto& vg = ps.velocity;
    const auto& m = ps.measure;
    double total = 0.0;
    for (std::size_t i = 0; i < f.nx(); ++i) {
        const auto fi = f.cell(i);
        double mean = 0.0;
        for (std::size_t j = 0; j < f.nv(); ++j) mean += vg.weights[j] * fi[j];
        mean /= vg.normalizer;
        double s = 0.0;
        for (std::size_t j = 0; j < f.nv(); ++j) {
            const double d = fi[j] - mean;
            s += m.velocity[j] * d * d;
        }
        total += m.spatial[i] * s;
    }
    return total;
}

DistributionField lift(const MacroField& rho, std::size_t nv) {
    DistributionField f(rho.size(), nv);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        for (double& v : f.cell(i)) v = rho.values[i];
    }
    return f;
}

double total_mass(const DistributionField& f, const MeasureWeights& m) {
    if (f.nx() != m.nx() || f.nv() != m.nv()) throw ContractViolation("total_mass: shape mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < f.nx(); ++i) {
        const auto fi = f.cell(i);
        double s = 0.0;
        for (std::size_t j = 0; j < f.nv(); ++j) s += m.velocity[j] * fi[j];
        total += m.spatial[i] * s;
    }
    return total;
}

double initial_mass(const DistributionField& f, const MeasureWeights& m) {
    return total_mass(f, m) / m.domain_weight();
}

void write_snapshot(std::ostream& out, const DistributionField& f, double vmax) {
    out << std::setprecision(17);
    out << f.nx() << ' ' << f.nv() << ' ' << vmax << ' ' << f.time() << '\n';
    for (std::size_t i = 0; i < f.nx(); ++i) {
        const auto row = f.cell(i);
        for (std::size_t j = 0; j < f.nv(); ++j) {
            if (j) out << ' ';
            out << row[j];
        }
        out << '\n';
    }
}

void write_snapshot(const std::string& path, const DistributionField& f, double vmax) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open snapshot file '" + path + "' for writing");
    write_snapshot(out, f, vmax);
}

Snapshot read_snapshot(std::istream& in) {
    std::size_t nx = 0, nv = 0;
    double vmax = 0.0, t = 0.0;
    if (!(in >> nx >> nv >> vmax >> t) || nx == 0 || nv == 0) {
        throw ConfigError("snapshot: malformed header");
    }
    Snapshot snap{DistributionField(nx, nv), vmax};
    snap.field.set_time(t);
    for (double& v : snap.field.values()) {
        if (!(in >> v)) throw ConfigError("snapshot: truncated value block");
    }
    return snap;
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("snapshot: cannot open '" + path + "'");
    return read_snapshot(in);
}

}  // namespace kinslab
