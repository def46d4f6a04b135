#include "lorentz/constants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lorentz/kernels.hpp"
#include "lorentz/parallel.hpp"
#include "lorentz/quadrature.hpp"
#include "lorentz/rng.hpp"

namespace lorentz {

namespace {

constexpr double kPi2Over6 = std::numbers::pi * std::numbers::pi / 6.0;

// |z| <= 1/2: terms shrink at least like 2^-k.
double li2_small(double z) {
  double sum = 0.0, power = z;
  for (int k = 1; k < 200; ++k) {
    const double term = power / (double(k) * double(k));
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    power *= z;
  }
  return sum;
}

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t count = 0;
};

McEstimate finish(const Moments& m) {
  const double n = double(m.count);
  const double mean = m.sum / n;
  const double var = std::max(0.0, (m.sum_sq / n - mean * mean) * n / (n - 1.0));
  return {mean, std::sqrt(var / n), m.count};
}

constexpr std::uint64_t kChunk = 1 << 16;

// Samples from the mixture density
//   q(u,v,w) = 1/s^2 + (1/6) sum_e 1/((1 - x_e)(s - x_e)),
// half radial (s uniform, direction uniform on the triangle), half spread
// over the three edge components.
Moments j_chunk(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> u(kChunk), v(kChunk), w(kChunk), r(kChunk);
  std::uniform_int_distribution<int> edge(0, 2);
  for (std::uint64_t i = 0; i < kChunk; ++i) {
    double p[3];
    for (;;) {
      if (uniform01(rng) < 0.5) {
        const double s = uniform01(rng);
        double a = uniform01(rng), b = uniform01(rng);
        if (a + b > 1.0) a = 1.0 - a, b = 1.0 - b;
        p[0] = s * a, p[1] = s * b, p[2] = s * (1.0 - a - b);
      } else {
        const int e = edge(rng);
        const double along = uniform01(rng);
        const double t = uniform01(rng) * (1.0 - along);
        const double alpha = uniform01(rng);
        p[e] = along;
        p[(e + 1) % 3] = t * alpha;
        p[(e + 2) % 3] = t * (1.0 - alpha);
      }
      // Measure-zero corner cases where the ratio is 0/0.
      if (p[0] + p[1] > 0.0 && p[0] + p[2] > 0.0 && p[1] + p[2] > 0.0 && p[0] < 1.0 &&
          p[1] < 1.0 && p[2] < 1.0) {
        break;
      }
    }
    u[i] = p[0], v[i] = p[1], w[i] = p[2];
  }
  kernels::active().importance_ratio(u, v, w, r);
  Moments m;
  for (double x : r) m.sum += x, m.sum_sq += x * x;
  m.count = kChunk;
  return m;
}

Moments simplex_chunk(std::uint64_t seed, std::uint64_t count) {
  Rng rng(seed);
  Moments m;
  for (std::uint64_t i = 0; i < count; ++i) {
    double s, r;
    if (uniform01(rng) < 0.5) {
      double x[3] = {uniform01(rng), uniform01(rng), uniform01(rng)};
      std::sort(x, x + 3);
      r = x[1], s = x[2];
    } else {
      s = uniform01(rng);
      r = s * uniform01(rng);
    }
    // f / q with f = (1-s)/(r s), q = 3 + 1/(2 r s).
    const double ratio = 2.0 * (1.0 - s) / (6.0 * r * s + 1.0);
    m.sum += ratio;
    m.sum_sq += ratio * ratio;
  }
  m.count = count;
  return m;
}

JEstimate j_cubature(const JOptions& opt) {
  const quad::BatchIntegrand kernel = [](std::span<const double> a, std::span<const double> b,
                                         std::span<double> out) {
    kernels::active().triangle_kernel(a, b, out);
  };
  const Vec2 v0{0, 0}, v1{1, 0}, v2{0, 1};
  const Vec2 m01{0.5, 0}, m02{0, 0.5}, m12{0.5, 0.5};
  const quad::Triangle pieces[4] = {
      {v0, m01, m02}, {v1, m12, m01}, {v2, m02, m12}, {m01, m12, m02}};
  // J = K / 2, so K is needed to 2 * target_err.
  const double tol = 2.0 * opt.target_err / 4.0;
  double value = 0.0, error = 0.0;
  std::uint64_t evals = 0;
  for (const auto& t : pieces) {
    const auto r = quad::integrate_triangle_duffy(kernel, t, tol, opt.initial_level);
    value += r.value;
    error += r.error;
    evals += r.evaluations;
  }
  return {0.5 * value, 0.5 * error, JMethod::cubature, evals};
}

JEstimate j_monte_carlo(const JOptions& opt) {
  const unsigned workers = resolve_workers(opt.workers);
  constexpr std::uint64_t kRound = 256;
  Moments total;
  std::uint64_t next_chunk = 0;
  std::vector<Moments> round(kRound);
  for (;;) {
    parallel_for(kRound, workers, [&](std::size_t i, unsigned) {
      round[i] = j_chunk(derive_seed(opt.seed, Stream::monte_carlo, next_chunk + i));
    });
    next_chunk += kRound;
    for (const auto& m : round) {
      total.sum += m.sum, total.sum_sq += m.sum_sq, total.count += m.count;
    }
    const auto est = finish(total);
    if (est.stderr_ <= opt.target_err) {
      return {est.mean, est.stderr_, JMethod::monte_carlo, est.samples};
    }
    if (total.count >= opt.max_samples) {
      throw QuadratureNonConvergence("Monte-Carlo J did not reach the target error");
    }
  }
}

}  // namespace

double li2(double x) {
  if (!(x >= -1.0 && x <= 1.0)) throw DomainError("li2 is implemented on [-1, 1]");
  if (x == 1.0) return kPi2Over6;
  if (x > 0.5) return kPi2Over6 - std::log(x) * std::log1p(-x) - li2_small(1.0 - x);
  if (x < -0.5) {
    const double l = std::log1p(-x);
    return -li2_small(x / (x - 1.0)) - 0.5 * l * l;
  }
  return li2_small(x);
}

double li2_series(double x, std::uint64_t terms) {
  // Summed smallest-first to limit rounding.
  double sum = 0.0;
  for (std::uint64_t k = terms; k >= 1; --k) {
    sum += std::pow(x, double(k)) / (double(k) * double(k));
  }
  return sum;
}

IntegralI integral_I() {
  const auto f = [](double u) {
    const double w = 1.0 - u;
    return w * w / u * (std::log(u) - std::log1p(-u));
  };
  const auto r = quad::integrate(f, 0.5, 1.0, 1e-13);
  const double closed = std::numbers::pi * std::numbers::pi / 12.0 + 0.25 -
                        1.5 * std::numbers::ln2;
  return {r.value, r.error, closed};
}

double integral_simplex_check() {
  // After integrating u over [0, r] the integrand is (1 - s)/s in r.
  const auto outer = [](double s) {
    const auto inner = [s](double r) { return r * (1.0 - s) / (r * s); };
    return quad::integrate(inner, 0.0, s, 1e-15).value;
  };
  return quad::integrate(outer, 0.0, 1.0, 1e-13).value;
}

McEstimate integral_simplex_check_mc(std::uint64_t samples, std::uint64_t seed,
                                     unsigned workers) {
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<Moments> parts(chunks);
  parallel_for(chunks, resolve_workers(workers), [&](std::size_t i, unsigned) {
    const std::uint64_t count = std::min<std::uint64_t>(kChunk, samples - i * kChunk);
    parts[i] = simplex_chunk(derive_seed(seed, Stream::monte_carlo, i), count);
  });
  Moments total;
  for (const auto& m : parts) total.sum += m.sum, total.sum_sq += m.sum_sq, total.count += m.count;
  return finish(total);
}

JEstimate integral_J(JMethod method, const JOptions& options) {
  if (method == JMethod::cubature) {
    if (options.target_err < 1e-6) throw ConfigError("cubature target_err must be >= 1e-6");
    return j_cubature(options);
  }
  if (options.target_err < 1e-4) throw ConfigError("Monte-Carlo target_err must be >= 1e-4");
  return j_monte_carlo(options);
}

JCrossCheck integral_J_cross_check(const JOptions& options) {
  JCrossCheck out{integral_J(JMethod::cubature, options), integral_J(JMethod::monte_carlo, options),
                  0.0};
  const double combined = std::hypot(out.cubature.error, out.monte_carlo.error);
  out.z_score = std::abs(out.cubature.value - out.monte_carlo.value) / combined;
  if (out.z_score > 3.0) {
    throw MethodDisagreement("cubature and Monte-Carlo J differ by " +
                             std::to_string(out.z_score) + " combined errors");
  }
  return out;
}

double j_positivity_threshold() { return (kPi2Over6 - 1.0) / 2.0; }

ConstantsReport theoretical_constants(const BilliardTable& table, const DiffusionMatrix& sigma2,
                                      const JEstimate& J) {
  if (!(sigma2.sqrt_det > 0.0)) throw DegenerateMatrix("sqrt(det Sigma^2) must be positive");
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& d : table.disks()) {
    sum += d.perimeter();
    sum_sq += d.perimeter() * d.perimeter();
  }
  ConstantsReport r;
  r.perimeter_factor = sum_sq / (sum * sum);
  r.sigma2 = sigma2;
  r.c0 = r.perimeter_factor / (std::numbers::pi * sigma2.sqrt_det);
  r.c0_err = r.c0 * sigma2.sqrt_det_stderr() / sigma2.sqrt_det;
  r.c1 = r.c0 / 2.0;
  r.c1_err = r.c0_err / 2.0;
  r.J = J.value;
  r.J_err = J.error;
  const double bracket = 1.0 + 2.0 * J.value - kPi2Over6;
  r.c = r.c0 * r.c0 * bracket;
  r.c_err = std::hypot(2.0 * r.c0 * bracket * r.c0_err, 2.0 * r.c0 * r.c0 * J.error);
  const auto I = integral_I();
  r.I_closed = I.closed_form;
  r.I_quad = I.quadrature;
  r.notes = "P(I_0 = i) taken as the perimeter fraction; Sigma^2 method " +
            std::string(to_string(sigma2.method));
  return r;
}

}  // namespace lorentz
