#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kinslab/grids.hpp"

namespace kinslab {

/// Samples f(x_i, v_j), stored row-major with one row of N_v values per cell.
class DistributionField {
public:
    DistributionField() = default;
    DistributionField(std::size_t nx, std::size_t nv, double fill = 0.0)
        : nx_(nx), nv_(nv), values_(nx * nv, fill) {}
    explicit DistributionField(const PhaseSpace& ps, double fill = 0.0)
        : DistributionField(ps.nx(), ps.nv(), fill) {}

    std::size_t nx() const { return nx_; }
    std::size_t nv() const { return nv_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return values_[i * nv_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * nv_ + j]; }

    std::span<double> cell(std::size_t i) { return {values_.data() + i * nv_, nv_}; }
    std::span<const double> cell(std::size_t i) const { return {values_.data() + i * nv_, nv_}; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    bool same_shape(const DistributionField& other) const {
        return nx_ == other.nx_ && nv_ == other.nv_;
    }
    bool all_finite() const;

private:
    std::size_t nx_ = 0;
    std::size_t nv_ = 0;
    std::vector<double> values_;
    double time_ = 0.0;
};

/// A velocity-independent quantity rho(x_i).
struct MacroField {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Throws ContractViolation unless f matches the phase-space shape.
void require_shape(const DistributionField& f, const PhaseSpace& ps, const char* where);

/// Sum_ij m_ij F_ij G_ij.
double inner_dm(const DistributionField& f, const DistributionField& g, const MeasureWeights& m);
double norm_dm(const DistributionField& f, const MeasureWeights& m);

/// Macro inner product sum_i e^{-phi(x_i)} dx a_i b_i (the dm product of
/// velocity-independent functions).
double inner_x(const MacroField& a, const MacroField& b, const MeasureWeights& m);
double norm_x(const MacroField& a, const MeasureWeights& m);

/// <f>_i = Z^{-1} sum_j w_j f_ij.
MacroField moment0(const DistributionField& f, const VelocityGrid& vgrid);
/// <v f>_i = Z^{-1} sum_j w_j v_j f_ij.
MacroField moment1(const DistributionField& f, const VelocityGrid& vgrid);
/// f - <f>.
DistributionField perp(const DistributionField& f, const VelocityGrid& vgrid);
/// ||f_perp||^2 without materializing f_perp.
double perp_norm_squared(const DistributionField& f, const PhaseSpace& ps);

/// Broadcast a macro field along velocity.
DistributionField lift(const MacroField& rho, std::size_t nv);

/// Integral of f against dm.
double total_mass(const DistributionField& f, const MeasureWeights& m);
/// M0 = (int e^{-phi} dx)^{-1} int f dm.
double initial_mass(const DistributionField& f, const MeasureWeights& m);

/// Text snapshot: a header line "N_x N_v V_max t" followed by N_x rows of N_v
/// values (17 significant digits).
void write_snapshot(std::ostream& out, const DistributionField& f, double vmax);
void write_snapshot(const std::string& path, const DistributionField& f, double vmax);

struct Snapshot {
    DistributionField field;
    double vmax = 0.0;
};
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot(const std::string& path);

}  // namespace kinslab
