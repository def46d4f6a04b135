#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "lorentz/app.hpp"
#include "lorentz/error.hpp"

namespace {

std::array<double, 3> parse_entries(const std::string& text) {
  std::array<double, 3> e{};
  std::stringstream ss(text);
  std::string cell;
  std::size_t i = 0;
  while (std::getline(ss, cell, ',')) {
    if (i == 3) throw lorentz::ConfigError("--sigma2-entries takes xx,xy,yy");
    std::size_t used = 0;
    e[i++] = std::stod(cell, &used);
    if (used != cell.size()) throw lorentz::ConfigError("bad number in --sigma2-entries");
  }
  if (i != 3) throw lorentz::ConfigError("--sigma2-entries takes xx,xy,yy");
  return e;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic Lorentz gas: self-intersection statistics of collision sequences"};
  app.set_version_flag("--version", lorentz::app::version());
  app.require_subcommand(1);

  std::string config_path, init, mode, table_path, sigma2_file, sigma2_entries, out;
  std::optional<std::uint64_t> seed, n_max, steps;
  std::optional<unsigned> workers;
  std::optional<std::size_t> trajectories;

  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--workers", workers, "worker threads (default: LORENTZ_LAB_THREADS, then all)");
  app.add_option("--out", out, "output directory");
  app.add_option("--init", init, "initial law: stationary | uniform-q");
  app.add_option("--mode", mode, "horizon mode: strict | permissive");
  app.add_option("--table", table_path, "table file, overrides the config");
  app.add_option("-M,--trajectories", trajectories, "ensemble size");
  app.add_option("--n-max", n_max, "trajectory length");

  auto* corridor = app.add_subcommand("corridor-check", "decide finite horizon (exit 0 finite, 2 corridor)");
  auto* simulate = app.add_subcommand("simulate", "dump one trajectory as CSV");
  simulate->add_option("--steps", steps, "collisions to record");
  auto* estimate = app.add_subcommand("estimate", "V_n ensemble, return curve and Sigma^2");
  auto* constants = app.add_subcommand("constants", "theoretical constants from Sigma^2 and J");
  constants->add_option("--sigma2", sigma2_file, "sigma2.csv written by estimate");
  constants->add_option("--sigma2-entries", sigma2_entries, "literal xx,xy,yy");
  auto* baseline = app.add_subcommand("baseline-walk", "estimate on the lazy lattice walk");
  for (auto* sub : {corridor, simulate, estimate, constants, baseline}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = config_path.empty() ? lorentz::app::RunConfig{} : lorentz::app::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    if (!out.empty()) cfg.out = out;
    if (!init.empty()) cfg.init = lorentz::parse_init_mode(init);
    if (!mode.empty()) cfg.mode = lorentz::app::parse_mode(mode);
    if (!table_path.empty()) cfg.table.reset(), cfg.table_file = table_path;
    if (trajectories) cfg.trajectories = *trajectories;
    if (n_max) cfg.n_max = *n_max, cfg.checkpoints.clear();
    if (steps) cfg.steps = *steps;
    if (!sigma2_file.empty()) cfg.sigma2_file = sigma2_file;
    if (!sigma2_entries.empty()) cfg.sigma2_entries = parse_entries(sigma2_entries);

    if (*corridor) return lorentz::app::corridor_check(cfg, std::cout);
    if (*simulate) lorentz::app::simulate(cfg);
    if (*estimate) lorentz::app::estimate(cfg);
    if (*constants) lorentz::app::constants(cfg, std::cout);
    if (*baseline) lorentz::app::baseline_walk(cfg);
  } catch (const lorentz::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
