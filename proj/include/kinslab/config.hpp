#pragma once

// INI run configuration. Sections and keys:
//   [model]     collision = bgk|fp, epsilon
//   [grids]     nx, nv, vmax
//   [boundary]  alpha, beta (both walls), alpha_left, beta_left, alpha_right,
//               beta_right (per wall, override), iota
//   [potential] kind = zero|linear|cosine|table, amplitude, file
//   [initial]   kind = cosine|bump|shifted|constant, amplitude, center, width, value
//   [time]      final, cfl, record_interval
//   [output]    snapshots = true|false
// Unknown sections or keys are rejected.

#include <string>

#include <json.hpp>

#include "kinslab/transport.hpp"

namespace kinslab {

struct OutputOptions {
    bool snapshots = false;
};

struct RunConfig {
    SimConfig sim;
    OutputOptions output;
};

/// `base_dir` resolves a relative potential table path.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Every resolved parameter, defaults included.
nlohmann::json config_echo(const RunConfig& cfg);

/// INI text that parses back to the same configuration.
std::string render_config(const RunConfig& cfg);

}  // namespace kinslab
