#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinslab/config.hpp"
#include "kinslab/diagnostics.hpp"

namespace kinslab {

/// Code version recorded in every manifest.
const char* version_string();

/// Summary of one completed run: manifest, final norms, rate fit, ledger and
/// structural checks. Contains nothing time-dependent, so identical inputs
/// give identical JSON.
nlohmann::json run_summary(const RunConfig& cfg, const Trajectory& traj,
                           std::optional<FitWindow> window = std::nullopt);

/// One run. Writes diagnostics.csv, summary.json, timing.json and, when
/// requested, snapshots/ into out_dir. Files appear only after the run
/// succeeded. Returns the summary.
nlohmann::json cmd_run(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// One run per epsilon (each in out_dir/eps_<value>), a per-epsilon rate table
/// and the max/min lambda ratio. Failed members mark the sweep partial.
/// Writes out_dir/sweep.json. ConfigError on an empty or invalid list.
nlohmann::json cmd_sweep(const RunConfig& base, const std::vector<double>& epsilons, unsigned workers,
                         const std::filesystem::path& out_dir);

/// Kinetic runs against the limiting parabolic solution (plus the initial
/// layer for data that are not well prepared), with a control run on twice
/// the cells whose Richardson combination removes the first-order scheme
/// error. Tabulates raw and corrected gaps and their fitted orders in
/// epsilon; writes out_dir/limit.json.
nlohmann::json cmd_limit(const RunConfig& base, const std::vector<double>& epsilons, unsigned workers,
                         const std::filesystem::path& out_dir);

/// Re-fits a diagnostics CSV. Without an explicit window the default window
/// for `epsilon` is used.
nlohmann::json cmd_fit(const std::filesystem::path& csv, const std::string& column,
                       std::optional<FitWindow> window, double epsilon);

/// Least-squares slope of log(gap) against log(eps).
double loglog_order(const std::vector<double>& epsilons, const std::vector<double>& gaps);

/// Writes text to path through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace kinslab
