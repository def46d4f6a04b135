#pragma once

// Subcommand runners behind the lorentz_lab executable.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lorentz/constants.hpp"
#include "lorentz/dynamics.hpp"

namespace lorentz::app {

struct RunConfig {
  /// Inline table document; wins over table_file. Default table if neither.
  std::optional<nlohmann::json> table;
  std::optional<std::filesystem::path> table_file;
  HorizonMode mode = HorizonMode::strict;
  InitMode init = InitMode::stationary;

  std::size_t trajectories = 100;  // M
  std::uint64_t n_max = 4096;
  /// Empty: powers of two from 16 up to n_max, plus n_max.
  std::vector<std::uint64_t> checkpoints;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: LORENTZ_LAB_THREADS, then hardware threads
  std::filesystem::path out = ".";

  /// Return-probability run; 0 trajectories means "same as M", empty ks a
  /// 1-2-5 ladder up to min(n_max, 1000).
  std::size_t return_trajectories = 0;
  std::vector<std::uint64_t> return_ks;

  /// Green-Kubo run used for sigma2.csv.
  std::uint64_t gk_burn_in = 1000;
  std::size_t gk_lag = 512;
  std::uint64_t gk_steps = 1 << 20;

  /// simulate: collisions to dump.
  std::uint64_t steps = 1000;

  /// constants: sigma2 source, J settings.
  std::optional<std::filesystem::path> sigma2_file;
  std::optional<std::array<double, 3>> sigma2_entries;  // xx, xy, yy
  JMethod j_method = JMethod::cubature;
  double j_target_err = 1e-6;
};

HorizonMode parse_mode(std::string_view text);
std::string_view to_string(HorizonMode mode);

/// Unknown keys are rejected. Relative paths resolve against `base_dir`.
RunConfig config_from_json(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

BilliardTable resolve_table(const RunConfig& cfg);
std::vector<std::uint64_t> resolve_checkpoints(const RunConfig& cfg);
std::vector<std::uint64_t> resolve_return_ks(const RunConfig& cfg);

/// Exit codes: 0 finite, 2 open corridor. Validation errors throw.
int corridor_check(const RunConfig& cfg, std::ostream& out);

/// Writes trajectory.csv and manifest.json under cfg.out.
void simulate(const RunConfig& cfg);

/// Writes ensemble.csv, returns.csv, sigma2.csv and manifest.json under cfg.out.
void estimate(const RunConfig& cfg);
void baseline_walk(const RunConfig& cfg);

/// First row of a sigma2.csv file as written by estimate.
DiffusionMatrix read_sigma2_csv(const std::filesystem::path& path);

/// Prints the report as JSON on `out`; writes constants.csv and
/// constants.json under cfg.out.
ConstantsReport constants(const RunConfig& cfg, std::ostream& out);

std::string version();

}  // namespace lorentz::app
