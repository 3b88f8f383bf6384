#pragma once

// Discrete phase space for the slab (0,1) x R: offset-symmetric velocity
// quadrature for the Gaussian measure, a uniform cell-centred mesh, the
// external potential and the weights of dm = e^{-phi} dmu dx.

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace kinslab {

enum class Wall { Left = 0, Right = 1 };

inline constexpr std::array<Wall, 2> kWalls{Wall::Left, Wall::Right};

constexpr std::size_t wall_index(Wall w) { return static_cast<std::size_t>(w); }
constexpr double outward_normal(Wall w) { return w == Wall::Left ? -1.0 : 1.0; }
const char* wall_name(Wall w);

/// Standard Gaussian density (2 pi)^{-1/2} e^{-v^2/2}.
double gaussian_density(double v);

struct VelocityGrid {
    std::vector<double> nodes;    ///< v_j = (j - N/2 + 1/2) dv, never zero
    std::vector<double> weights;  ///< w_j = mu(v_j) dv (un-normalized)
    /// mu(v_{j+1/2}) on the N-1 interior faces; Fokker-Planck flux weights.
    std::vector<double> face_density;
    /// -sum_{k<=j} v_k w_k on the N-1 interior faces. Discrete analogue of
    /// mu(v_{j+1/2}) whose differences reproduce v_j w_j exactly; used by the
    /// force term so that the global equilibrium stays stationary.
    std::vector<double> force_face_weight;
    double dv = 0.0;
    double vmax = 0.0;
    double normalizer = 0.0;          ///< Z = sum_j w_j
    double outgoing_flux_sum = 0.0;   ///< S+ = sum_{v_j > 0} w_j |v_j|  (== S-)
    double normalization_error = 0.0; ///< |Z - 1|
    double second_moment_error = 0.0; ///< |sum w_j v_j^2 / Z - 1|
    double tolerance = 0.0;           ///< declared bound on |Z - 1|

    std::size_t size() const { return nodes.size(); }
    std::size_t mirror(std::size_t j) const { return size() - 1 - j; }
    /// True when n_wall * v_j > 0, i.e. particles leave the domain.
    bool is_outgoing(Wall w, std::size_t j) const { return outward_normal(w) * nodes[j] > 0.0; }
};

/// Requires nv even, nv >= 8, vmax >= 4. Throws ConfigError otherwise.
VelocityGrid build_velocity_grid(int nv, double vmax);

struct SpatialGrid {
    std::size_t nx = 0;
    double dx = 0.0;
    std::vector<double> centers;  ///< x_i = (i + 1/2) dx

    double face(std::size_t k) const { return static_cast<double>(k) * dx; }
};

SpatialGrid build_spatial_grid(int nx);

enum class PotentialKind { Zero, Linear, Cosine, Tabulated };

struct PotentialSpec {
    PotentialKind kind = PotentialKind::Zero;
    double amplitude = 0.0;  ///< a in a*x or a*cos(pi x)
    std::vector<std::pair<double, double>> table;  ///< (x, phi) samples, sorted by x
    std::string source;  ///< file the table came from, for the manifest

    double value(double x) const;
    double slope(double x) const;
};

/// Reads a two-column whitespace-separated text file of (x, phi). Lines starting
/// with '#' are ignored.
PotentialSpec read_potential_table(const std::string& path);

std::string to_string(PotentialKind kind);
PotentialKind parse_potential_kind(const std::string& name);

struct Potential {
    PotentialSpec spec;
    std::vector<double> center;      ///< phi(x_i)
    std::vector<double> face;        ///< phi(x_{i-1/2}), nx + 1 entries
    std::vector<double> face_slope;  ///< phi'(x_{i-1/2})
    double lipschitz = 0.0;          ///< max |phi'| over faces

    double at_wall(Wall w) const { return w == Wall::Left ? face.front() : face.back(); }
};

Potential build_potential(const PotentialSpec& spec, const SpatialGrid& grid);

/// Weights of the discrete inner products. The cell-node weight is
/// m_ij = spatial[i] * velocity[j] with spatial[i] = e^{-phi(x_i)} dx and
/// velocity[j] = w_j / Z.
struct MeasureWeights {
    std::vector<double> spatial;
    std::vector<double> velocity;
    std::vector<double> velocity_nodes;
    std::array<double, 2> wall{};  ///< e^{-phi(wall)}

    std::size_t nx() const { return spatial.size(); }
    std::size_t nv() const { return velocity.size(); }
    double cell_node(std::size_t i, std::size_t j) const { return spatial[i] * velocity[j]; }
    double boundary_node(Wall w, std::size_t j) const { return wall[wall_index(w)] * velocity[j]; }
    /// sum_i e^{-phi(x_i)} dx, the discrete integral of e^{-phi}.
    double domain_weight() const;
};

MeasureWeights build_measure(const VelocityGrid& vgrid, const SpatialGrid& xgrid,
                             const Potential& potential);

struct PhaseSpace {
    VelocityGrid velocity;
    SpatialGrid space;
    Potential potential;
    MeasureWeights measure;

    std::size_t nx() const { return space.nx; }
    std::size_t nv() const { return velocity.size(); }
};

PhaseSpace build_phase_space(int nx, int nv, double vmax, const PotentialSpec& potential);

/// Per-wall velocity traces; values[wall][j] for every velocity node.
using WallValues = std::array<std::vector<double>, 2>;

/// Velocity weight for boundary pairings, evaluated at (wall, v_j).
using BoundaryWeight = std::function<double(Wall, double)>;

/// n_x . v
double normal_velocity(Wall w, double v);
/// (n_x . v)_+
double outgoing_velocity(Wall w, double v);

/// sum_wall sum_j e^{-phi(wall)} (w_j/Z) weight(wall, v_j) F G.
double inner_boundary(const WallValues& f, const WallValues& g, const BoundaryWeight& weight,
                      const MeasureWeights& measure);

}  // namespace kinslab
