#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lorentz/error.hpp"
#include "lorentz/parallel.hpp"
#include "lorentz/rng.hpp"
#include "lorentz/walkers.hpp"

namespace lorentz {

/// Symmetric 2x2 matrix.
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double det() const { return xx * yy - xy * xy; }
  Sym2 transposed_axes() const { return {yy, xy, xx}; }
};

enum class SigmaMethod { empirical, green_kubo, given };
std::string_view to_string(SigmaMethod m);

/// Asymptotic covariance of S_n / sqrt(n), per collision.
struct DiffusionMatrix {
  Sym2 sigma2;
  double sqrt_det = 0.0;
  SigmaMethod method = SigmaMethod::given;
  Sym2 stderr_;
  std::string note;  // diagnostics, e.g. a too-short lag cutoff

  /// Validates positive definiteness and fills sqrt_det.
  static DiffusionMatrix make(Sym2 sigma2, Sym2 stderr_, SigmaMethod method);
  /// Standard error of sqrt_det, first-order propagation from the entries.
  double sqrt_det_stderr() const;
};

struct EnsembleConfig {
  std::size_t trajectories = 0;  // M
  std::uint64_t n_max = 0;
  std::vector<std::uint64_t> checkpoints;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Test hook: every trajectory uses the seed of trajectory 0.
  bool identical_seeds = false;
};

struct EnsembleSummary {
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> mean_v;
  std::vector<double> var_v;
  std::vector<double> stderr_mean;
  std::vector<double> stderr_var;
  std::size_t trajectories = 0;
  std::uint64_t seed = 0;
  std::string source_digest;
};

struct EnsembleRun {
  EnsembleSummary summary;
  /// v[c * M + i]: V at checkpoint c for trajectory i.
  std::vector<std::uint64_t> v;
  /// displacement[c * M + i] = S_n - S_0 at checkpoint c for trajectory i.
  std::vector<Cell> displacement;
};

struct ReturnCurve {
  std::vector<std::uint64_t> ks;
  std::vector<double> p_hat;
  std::vector<double> ci_halfwidth;  // 95% Wilson interval half-width
  std::vector<std::uint64_t> returns;
  std::size_t trajectories = 0;
};

struct ReturnFit {
  double c1 = 0.0;         // coefficient of 1/k
  double c1_stderr = 0.0;
  double correction = 0.0;  // coefficient of 1/k^2
  double flatness = 0.0;    // max / min of k p_hat(k) over the window
};

struct ConstantFit {
  double c0_hat = 0.0;
  double c0_band = 0.0;
  double c_hat = 0.0;
  double c_band = 0.0;
  std::vector<double> var_ratio;  // var_V(n) / n^2 per checkpoint
  bool monotone_drift = false;
};

void validate_checkpoints(std::span<const std::uint64_t> checkpoints, std::uint64_t n_max);

/// Mean, unbiased variance and their standard errors per checkpoint from the
/// V table (layout as EnsembleRun::v). Variance errors use sqrt(M) batches.
EnsembleSummary summarize_ensemble(std::span<const std::uint64_t> v,
                                   std::span<const std::uint64_t> checkpoints,
                                   std::size_t trajectories);

/// Sigma^2 = (1/M) sum (S_n - mean)(S_n - mean)^T / n, jackknife errors.
DiffusionMatrix estimate_sigma2_empirical(std::span<const Cell> s_n, std::uint64_t n);

/// Truncated Green-Kubo sum C(0) + sum_{j=1..L} (C(j) + C(j)^T) of the step
/// autocovariance, batch-means errors.
DiffusionMatrix estimate_sigma2_greenkubo_steps(std::span<const Cell> steps, std::size_t lag_cutoff,
                                                std::size_t batches = 32);

/// Counts -> probabilities with Wilson intervals.
ReturnCurve make_return_curve(std::span<const std::uint64_t> ks,
                              std::span<const std::uint64_t> returns, std::size_t trajectories);

/// Weighted least squares p(k) = c1/k + d/k^2 over ks in [k_lo, k_hi].
ReturnFit fit_return_curve(const ReturnCurve& curve, std::uint64_t k_lo, std::uint64_t k_hi);

/// c0 from mean_V/(n log n) and c from var_V/n^2, averaged over the top
/// decade of checkpoints.
ConstantFit fit_constants(const EnsembleSummary& summary);

template <SiteSource Source>
EnsembleRun run_ensemble(const Source& source, const EnsembleConfig& cfg) {
  if (cfg.trajectories < 2) throw InsufficientData("ensemble needs at least 2 trajectories");
  validate_checkpoints(cfg.checkpoints, cfg.n_max);
  const std::size_t m = cfg.trajectories;
  const std::size_t nc = cfg.checkpoints.size();
  EnsembleRun run;
  run.v.assign(nc * m, 0);
  run.displacement.assign(nc * m, Cell{});

  parallel_for(m, resolve_workers(cfg.workers), [&](std::size_t i, unsigned) {
    const std::uint64_t index = cfg.identical_seeds ? 0 : i;
    auto w = source.walker(derive_seed(cfg.seed, Stream::trajectory, index));
    const Cell origin = w.initial().cell;
    VisitCounter counter;
    counter.reserve(cfg.checkpoints.back());
    std::size_t c = 0;
    for (std::uint64_t k = 1; c < nc; ++k) {
      const auto step = w.next();
      const auto v = counter.visit(step.key);
      if (cfg.checkpoints[c] == k) {
        run.v[c * m + i] = v;
        run.displacement[c * m + i] = step.cell - origin;
        ++c;
      }
    }
  });

  run.summary = summarize_ensemble(run.v, cfg.checkpoints, m);
  run.summary.seed = cfg.seed;
  run.summary.source_digest = source.digest();
  return run;
}

/// Fraction of walkers whose site at step k equals their starting site.
/// Uses the return-probability random stream, independent of run_ensemble.
template <SiteSource Source>
ReturnCurve return_probability(const Source& source, std::span<const std::uint64_t> ks,
                               std::size_t trajectories, std::uint64_t seed, unsigned workers) {
  if (ks.empty()) throw InsufficientData("return_probability needs at least one lag");
  std::uint64_t k_max = 0;
  for (auto k : ks) {
    if (k == 0) throw ConfigError("return lags must be >= 1");
    k_max = std::max(k_max, k);
  }
  const unsigned nw = resolve_workers(workers);
  // Integer counts: summation order does not matter.
  std::vector<std::vector<std::uint64_t>> per_worker(nw,
                                                     std::vector<std::uint64_t>(k_max + 1, 0));
  parallel_for(trajectories, nw, [&](std::size_t i, unsigned worker) {
    auto w = source.walker(derive_seed(seed, Stream::return_probability, i));
    const std::uint64_t home = w.initial().key;
    auto& counts = per_worker[worker];
    for (std::uint64_t k = 1; k <= k_max; ++k) {
      if (w.next().key == home) ++counts[k];
    }
  });
  std::vector<std::uint64_t> totals(k_max + 1, 0);
  for (const auto& pw : per_worker) {
    for (std::size_t k = 0; k <= k_max; ++k) totals[k] += pw[k];
  }
  std::vector<std::uint64_t> selected;
  for (auto k : ks) selected.push_back(totals[k]);
  return make_return_curve(ks, selected, trajectories);
}

/// Green-Kubo estimate from one long stationary walk: `burn_in` discarded
/// steps, then `steps` recorded displacement increments.
template <SiteSource Source>
DiffusionMatrix estimate_sigma2_greenkubo(const Source& source, std::uint64_t burn_in,
                                          std::size_t lag_cutoff, std::uint64_t steps,
                                          std::uint64_t seed) {
  auto w = source.walker(derive_seed(seed, Stream::green_kubo, 0));
  Cell prev = w.initial().cell;
  for (std::uint64_t k = 0; k < burn_in; ++k) prev = w.next().cell;
  std::vector<Cell> xi;
  xi.reserve(steps);
  for (std::uint64_t k = 0; k < steps; ++k) {
    const Cell c = w.next().cell;
    xi.push_back(c - prev);
    prev = c;
  }
  return estimate_sigma2_greenkubo_steps(xi, lag_cutoff);
}

}  // namespace lorentz
