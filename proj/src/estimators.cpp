#include "lorentz/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <type_traits>

namespace lorentz {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kWilsonZ = 1.959963984540054;  // two-sided 95%

double unbiased_variance(std::span<const double> x) {
  if (x.size() < 2) return kNaN;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= double(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / double(x.size() - 1);
}

double frobenius(const Sym2& m) { return std::sqrt(m.xx * m.xx + 2 * m.xy * m.xy + m.yy * m.yy); }

struct Weighted {
  double value;
  double band;
};

// Inverse-variance weighted mean; equal weights when any error is missing.
Weighted weighted_mean(const std::vector<double>& x, const std::vector<double>& err) {
  bool usable = true;
  for (double e : err) usable = usable && std::isfinite(e) && e > 0.0;
  if (!usable) {
    double s = 0.0, b = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s += x[i];
      if (std::isfinite(err[i])) b += err[i];
    }
    return {s / double(x.size()), b / double(x.size())};
  }
  double sw = 0.0, swx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (err[i] * err[i]);
    sw += w;
    swx += w * x[i];
  }
  return {swx / sw, 1.0 / std::sqrt(sw)};
}

}  // namespace

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LORENTZ_LAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string_view to_string(SigmaMethod m) {
  switch (m) {
    case SigmaMethod::empirical: return "empirical";
    case SigmaMethod::green_kubo: return "green-kubo";
    case SigmaMethod::given: return "given";
  }
  return "given";
}

DiffusionMatrix DiffusionMatrix::make(Sym2 sigma2, Sym2 stderr_, SigmaMethod method) {
  if (!(sigma2.xx > 0.0) || !(sigma2.yy > 0.0) || !(sigma2.det() > 0.0)) {
    throw DegenerateMatrix("Sigma^2 estimate is not positive definite (det " +
                           std::to_string(sigma2.det()) + ")");
  }
  DiffusionMatrix d;
  d.sigma2 = sigma2;
  d.sqrt_det = std::sqrt(sigma2.det());
  d.method = method;
  d.stderr_ = stderr_;
  return d;
}

double DiffusionMatrix::sqrt_det_stderr() const {
  const double gxx = sigma2.yy / (2.0 * sqrt_det);
  const double gyy = sigma2.xx / (2.0 * sqrt_det);
  const double gxy = -sigma2.xy / sqrt_det;
  return std::sqrt(gxx * gxx * stderr_.xx * stderr_.xx + gyy * gyy * stderr_.yy * stderr_.yy +
                   gxy * gxy * stderr_.xy * stderr_.xy);
}

void validate_checkpoints(std::span<const std::uint64_t> checkpoints, std::uint64_t n_max) {
  if (checkpoints.empty()) throw ConfigError("at least one checkpoint is required");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > n_max) {
      throw ConfigError("checkpoints must lie in [1, n_max]");
    }
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      throw ConfigError("checkpoints must be strictly increasing");
    }
  }
}

EnsembleSummary summarize_ensemble(std::span<const std::uint64_t> v,
                                   std::span<const std::uint64_t> checkpoints,
                                   std::size_t m) {
  EnsembleSummary s;
  s.checkpoints.assign(checkpoints.begin(), checkpoints.end());
  s.trajectories = m;
  const std::size_t batches = static_cast<std::size_t>(std::sqrt(double(m)));
  const std::size_t batch_size = batches > 0 ? m / batches : 0;
  std::vector<double> x(m);
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    for (std::size_t i = 0; i < m; ++i) x[i] = double(v[c * m + i]);
    double mean = 0.0;
    for (double xi : x) mean += xi;
    mean /= double(m);
    const double var = unbiased_variance(x);
    s.mean_v.push_back(mean);
    s.var_v.push_back(var);
    s.stderr_mean.push_back(std::sqrt(var / double(m)));

    double se_var = kNaN;
    if (batches >= 2) {
      std::vector<double> batch_vars;
      for (std::size_t b = 0; b < batches; ++b) {
        batch_vars.push_back(unbiased_variance(
            std::span<const double>(x).subspan(b * batch_size, batch_size)));
      }
      se_var = std::sqrt(unbiased_variance(batch_vars) / double(batches));
    }
    s.stderr_var.push_back(se_var);
  }
  return s;
}

DiffusionMatrix estimate_sigma2_empirical(std::span<const Cell> s_n, std::uint64_t n) {
  const std::size_t m = s_n.size();
  if (m < 100) throw InsufficientData("empirical Sigma^2 needs at least 100 trajectories");
  if (n == 0) throw ConfigError("empirical Sigma^2 needs n >= 1");
  double mx = 0.0, my = 0.0;
  for (const auto& c : s_n) mx += double(c.x), my += double(c.y);
  mx /= double(m);
  my /= double(m);
  // Centered sums; covariance is shift invariant.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& c : s_n) {
    const double x = double(c.x) - mx, y = double(c.y) - my;
    sx += x, sy += y, sxx += x * x, sxy += x * y, syy += y * y;
  }
  const double dm = double(m), dn = double(n);
  const Sym2 est{(sxx / dm - (sx / dm) * (sx / dm)) / dn,
                 (sxy / dm - (sx / dm) * (sy / dm)) / dn,
                 (syy / dm - (sy / dm) * (sy / dm)) / dn};

  // Jackknife over leave-one-out estimates.
  std::vector<Sym2> loo(m);
  Sym2 mean_loo;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = double(s_n[i].x) - mx, y = double(s_n[i].y) - my;
    const double k = dm - 1.0;
    const double ax = (sx - x) / k, ay = (sy - y) / k;
    loo[i] = {((sxx - x * x) / k - ax * ax) / dn, ((sxy - x * y) / k - ax * ay) / dn,
              ((syy - y * y) / k - ay * ay) / dn};
    mean_loo.xx += loo[i].xx, mean_loo.xy += loo[i].xy, mean_loo.yy += loo[i].yy;
  }
  mean_loo = {mean_loo.xx / dm, mean_loo.xy / dm, mean_loo.yy / dm};
  Sym2 var;
  for (const auto& l : loo) {
    var.xx += (l.xx - mean_loo.xx) * (l.xx - mean_loo.xx);
    var.xy += (l.xy - mean_loo.xy) * (l.xy - mean_loo.xy);
    var.yy += (l.yy - mean_loo.yy) * (l.yy - mean_loo.yy);
  }
  const double f = (dm - 1.0) / dm;
  return DiffusionMatrix::make(
      est, {std::sqrt(f * var.xx), std::sqrt(f * var.xy), std::sqrt(f * var.yy)},
      SigmaMethod::empirical);
}

namespace {

struct LagSums {
  std::int64_t xx = 0, xy = 0, yx = 0, yy = 0;
};

// Exact sums of a[k] b[k+j]. Narrow types accumulate in int32 blocks short
// enough not to overflow.
template <class T>
LagSums lag_sums(const std::vector<T>& x, const std::vector<T>& y, std::size_t j) {
  constexpr std::size_t block = std::is_same_v<T, std::int16_t> ? (1u << 16) : ~std::size_t{0};
  using Acc = std::conditional_t<std::is_same_v<T, std::int16_t>, std::int32_t, std::int64_t>;
  const std::size_t count = x.size() - j;
  LagSums out;
  for (std::size_t lo = 0; lo < count; lo += std::min(block, count - lo)) {
    const std::size_t hi = lo + std::min(block, count - lo);
    Acc sxx = 0, sxy = 0, syx = 0, syy = 0;
    for (std::size_t k = lo; k < hi; ++k) {
      sxx += Acc(x[k]) * Acc(x[k + j]);
      sxy += Acc(x[k]) * Acc(y[k + j]);
      syx += Acc(y[k]) * Acc(x[k + j]);
      syy += Acc(y[k]) * Acc(y[k + j]);
    }
    out.xx += sxx, out.xy += sxy, out.yx += syx, out.yy += syy;
  }
  return out;
}

// C(0) + sum_{j=1..L} (C(j) + C(j)^T) of the centered series. Lag products
// are summed exactly in integers; centering uses prefix sums.
Sym2 green_kubo_sum(std::span<const Cell> steps, double mx, double my, std::size_t lag_cutoff,
                    Sym2* c0_out, double* tail_norm) {
  const std::size_t n = steps.size();
  std::vector<std::int64_t> px(n + 1, 0), py(n + 1, 0);
  bool narrow = true;
  for (std::size_t k = 0; k < n; ++k) {
    px[k + 1] = px[k] + steps[k].x, py[k + 1] = py[k] + steps[k].y;
    narrow = narrow && std::abs(steps[k].x) <= 127 && std::abs(steps[k].y) <= 127;
  }
  std::vector<std::int16_t> x16, y16;
  std::vector<std::int64_t> x64, y64;
  for (const auto& c : steps) {
    if (narrow) {
      x16.push_back(std::int16_t(c.x)), y16.push_back(std::int16_t(c.y));
    } else {
      x64.push_back(c.x), y64.push_back(c.y);
    }
  }
  Sym2 total;
  for (std::size_t j = 0; j <= lag_cutoff; ++j) {
    const std::size_t count = n - j;
    const LagSums ls = narrow ? lag_sums(x16, y16, j) : lag_sums(x64, y64, j);
    const std::int64_t sxx = ls.xx, sxy = ls.xy, syx = ls.yx, syy = ls.yy;
    // sum (a - ma)(b - mb) = sum ab - mb sum a - ma sum b + count ma mb
    const double ax = double(px[count]), ay = double(py[count]);
    const double bx = double(px[n] - px[j]), by = double(py[n] - py[j]);
    const double c = double(count);
    const double cxx = (double(sxx) - mx * ax - mx * bx + c * mx * mx) / c;
    const double cxy = (double(sxy) - my * ax - mx * by + c * mx * my) / c;
    const double cyx = (double(syx) - mx * ay - my * bx + c * my * mx) / c;
    const double cyy = (double(syy) - my * ay - my * by + c * my * my) / c;
    if (j == 0) {
      total = {cxx, cxy, cyy};
      if (c0_out) *c0_out = total;
    } else {
      total.xx += 2 * cxx;
      total.xy += cxy + cyx;
      total.yy += 2 * cyy;
    }
    if (j == lag_cutoff && tail_norm) {
      *tail_norm = std::sqrt(cxx * cxx + cxy * cxy + cyx * cyx + cyy * cyy);
    }
  }
  return total;
}

}  // namespace

DiffusionMatrix estimate_sigma2_greenkubo_steps(std::span<const Cell> steps,
                                                std::size_t lag_cutoff, std::size_t batches) {
  if (batches < 2 || steps.size() / batches <= 10 * (lag_cutoff + 1)) {
    throw InsufficientData("Green-Kubo needs batches much longer than the lag cutoff");
  }
  double mx = 0, my = 0;
  for (const auto& c : steps) mx += double(c.x), my += double(c.y);
  mx /= double(steps.size());
  my /= double(steps.size());

  Sym2 c0;
  double tail = 0.0;
  const Sym2 value = green_kubo_sum(steps, mx, my, lag_cutoff, &c0, &tail);

  const std::size_t len = steps.size() / batches;
  std::vector<double> bxx, bxy, byy;
  for (std::size_t b = 0; b < batches; ++b) {
    const Sym2 e = green_kubo_sum(steps.subspan(b * len, len), mx, my, lag_cutoff, nullptr,
                                  nullptr);
    bxx.push_back(e.xx), bxy.push_back(e.xy), byy.push_back(e.yy);
  }
  const double nb = double(batches);
  auto d = DiffusionMatrix::make(value,
                                 {std::sqrt(unbiased_variance(bxx) / nb),
                                  std::sqrt(unbiased_variance(bxy) / nb),
                                  std::sqrt(unbiased_variance(byy) / nb)},
                                 SigmaMethod::green_kubo);
  if (tail > 1e-3 * frobenius(c0)) {
    d.note = "lag cutoff " + std::to_string(lag_cutoff) +
             " too small: |C(L)| exceeds 1e-3 |C(0)|";
  }
  return d;
}

ReturnCurve make_return_curve(std::span<const std::uint64_t> ks,
                              std::span<const std::uint64_t> returns, std::size_t m) {
  ReturnCurve curve;
  curve.trajectories = m;
  const double n = double(m);
  const double z2 = kWilsonZ * kWilsonZ;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double p = double(returns[i]) / n;
    curve.ks.push_back(ks[i]);
    curve.returns.push_back(returns[i]);
    curve.p_hat.push_back(p);
    curve.ci_halfwidth.push_back(kWilsonZ / (1.0 + z2 / n) *
                                 std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)));
  }
  return curve;
}

ReturnFit fit_return_curve(const ReturnCurve& curve, std::uint64_t k_lo, std::uint64_t k_hi) {
  // Normal equations for p = c1 x + d x^2 with x = 1/k, weights 1/Var(p_hat).
  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  std::size_t used = 0;
  const double m = double(curve.trajectories);
  for (std::size_t i = 0; i < curve.ks.size(); ++i) {
    const auto k = curve.ks[i];
    if (k < k_lo || k > k_hi) continue;
    const double p = curve.p_hat[i];
    if (p <= 0.0) throw InsufficientData("no returns observed at some lag in the fit window");
    const double x = 1.0 / double(k);
    const double w = m / (p * (1.0 - p));
    a11 += w * x * x, a12 += w * x * x * x, a22 += w * x * x * x * x;
    b1 += w * x * p, b2 += w * x * x * p;
    lo = std::min(lo, double(k) * p);
    hi = std::max(hi, double(k) * p);
    ++used;
  }
  if (used < 3) throw InsufficientData("return-curve fit needs at least 3 lags in the window");
  const double det = a11 * a22 - a12 * a12;
  ReturnFit fit;
  fit.c1 = (b1 * a22 - b2 * a12) / det;
  fit.correction = (a11 * b2 - a12 * b1) / det;
  fit.c1_stderr = std::sqrt(a22 / det);
  fit.flatness = hi / lo;
  return fit;
}

ConstantFit fit_constants(const EnsembleSummary& s) {
  const auto& n = s.checkpoints;
  if (n.size() < 4 || double(n.back()) < 100.0 * double(n.front())) {
    throw InsufficientData("constant fit needs >= 4 checkpoints spanning >= 2 decades");
  }
  ConstantFit fit;
  std::vector<double> mean_ratio, mean_err, var_ratio, var_err;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double dn = double(n[i]);
    fit.var_ratio.push_back(s.var_v[i] / (dn * dn));
    if (dn * 10.0 < double(n.back())) continue;
    const double nlogn = dn * std::log(dn);
    mean_ratio.push_back(s.mean_v[i] / nlogn);
    mean_err.push_back(s.stderr_mean[i] / nlogn);
    var_ratio.push_back(s.var_v[i] / (dn * dn));
    var_err.push_back(s.stderr_var[i] / (dn * dn));
  }
  const auto c0 = weighted_mean(mean_ratio, mean_err);
  const auto c = weighted_mean(var_ratio, var_err);
  fit.c0_hat = c0.value, fit.c0_band = c0.band;
  fit.c_hat = c.value, fit.c_band = c.band;

  bool up = true, down = true;
  for (std::size_t i = 1; i < fit.var_ratio.size(); ++i) {
    up = up && fit.var_ratio[i] >= fit.var_ratio[i - 1];
    down = down && fit.var_ratio[i] <= fit.var_ratio[i - 1];
  }
  fit.monotone_drift = up || down;
  return fit;
}

}  // namespace lorentz
