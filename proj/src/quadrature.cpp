#include "lorentz/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "lorentz/error.hpp"

namespace lorentz::quad {

namespace {

// 15-point Kronrod abscissae on [-1, 1] (non-negative half) with the
// embedded 7-point Gauss rule at the odd positions.
constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Full 15-node rule mapped to [0, 1]: nodes, Kronrod weights, Gauss weights
// (zero off the Gauss nodes).
struct Rule {
  std::array<double, 15> x{};
  std::array<double, 15> wk{};
  std::array<double, 15> wg{};
};

constexpr Rule make_rule() {
  Rule r;
  for (int i = 0; i < 7; ++i) {
    r.x[i] = 0.5 * (1.0 - kXk[i]);
    r.x[14 - i] = 0.5 * (1.0 + kXk[i]);
    r.wk[i] = r.wk[14 - i] = 0.5 * kWk[i];
    if (i % 2 == 1) r.wg[i] = r.wg[14 - i] = 0.5 * kWg[i / 2];
  }
  r.x[7] = 0.5;
  r.wk[7] = 0.5 * kWk[7];
  r.wg[7] = 0.5 * kWg[3];
  return r;
}

constexpr Rule kRule = make_rule();

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

Interval gk15(const std::function<double(double)>& f, double a, double b) {
  const double h = b - a;
  double k = 0.0, g = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double y = f(a + h * kRule.x[i]);
    k += kRule.wk[i] * y;
    g += kRule.wg[i] * y;
  }
  return {a, b, h * k, std::abs(h * (k - g))};
}

struct Region {
  double x0, y0, size, value, error;
  bool operator<(const Region& o) const { return error < o.error; }
};

class SquareRule {
 public:
  explicit SquareRule(const BatchIntegrand& g) : g_(g), xs_(225), ys_(225), out_(225) {}

  Region eval(double x0, double y0, double size) {
    for (int i = 0; i < 15; ++i) {
      for (int j = 0; j < 15; ++j) {
        xs_[15 * i + j] = x0 + size * kRule.x[i];
        ys_[15 * i + j] = y0 + size * kRule.x[j];
      }
    }
    g_(xs_, ys_, out_);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 15; ++i) {
      for (int j = 0; j < 15; ++j) {
        const double y = out_[15 * i + j];
        k += kRule.wk[i] * kRule.wk[j] * y;
        g += kRule.wg[i] * kRule.wg[j] * y;
      }
    }
    const double area = size * size;
    evaluations += 225;
    return {x0, y0, size, area * k, std::abs(area * (k - g))};
  }

  std::size_t evaluations = 0;

 private:
  const BatchIntegrand& g_;
  std::vector<double> xs_, ys_, out_;
};

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 std::size_t max_intervals) {
  std::priority_queue<Interval> heap;
  heap.push(gk15(f, a, b));
  double value = heap.top().value, error = heap.top().error;
  std::size_t evals = 15;
  while (error > abs_tol) {
    if (heap.size() >= max_intervals) {
      throw QuadratureNonConvergence("adaptive Gauss-Kronrod hit the interval limit");
    }
    const Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Interval left = gk15(f, worst.a, mid), right = gk15(f, mid, worst.b);
    evals += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the running-update rounding.
  value = 0.0, error = 0.0;
  for (; !heap.empty(); heap.pop()) value += heap.top().value, error += heap.top().error;
  return {value, error, evals};
}

Result integrate_square(const BatchIntegrand& g, double abs_tol, int initial_level,
                        std::size_t max_regions) {
  SquareRule rule(g);
  std::priority_queue<Region> heap;
  const int cuts = 1 << initial_level;
  const double size = 1.0 / cuts;
  double value = 0.0, error = 0.0;
  for (int i = 0; i < cuts; ++i) {
    for (int j = 0; j < cuts; ++j) {
      heap.push(rule.eval(i * size, j * size, size));
    }
  }
  auto total_error = [&heap]() {
    auto copy = heap;
    double e = 0.0;
    for (; !copy.empty(); copy.pop()) e += copy.top().error;
    return e;
  };
  error = total_error();
  while (error > abs_tol) {
    if (heap.size() >= max_regions) {
      throw QuadratureNonConvergence("adaptive cubature hit the region limit");
    }
    const Region worst = heap.top();
    heap.pop();
    error -= worst.error;
    const double h = 0.5 * worst.size;
    for (int q = 0; q < 4; ++q) {
      const Region r = rule.eval(worst.x0 + (q & 1) * h, worst.y0 + (q >> 1) * h, h);
      error += r.error;
      heap.push(r);
    }
  }
  value = 0.0, error = 0.0;
  for (; !heap.empty(); heap.pop()) value += heap.top().value, error += heap.top().error;
  return {value, error, rule.evaluations};
}

Result integrate_triangle_duffy(const BatchIntegrand& f, const Triangle& tri, double abs_tol,
                                int initial_level) {
  const Vec2 e1 = tri.b - tri.apex;
  const Vec2 e2 = tri.c - tri.b;
  const double jac = std::abs(cross(e1, e2));
  std::vector<double> px, py;
  const BatchIntegrand mapped = [&](std::span<const double> s, std::span<const double> t,
                                    std::span<double> out) {
    px.resize(s.size());
    py.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      px[i] = tri.apex.x + s[i] * (e1.x + t[i] * e2.x);
      py[i] = tri.apex.y + s[i] * (e1.y + t[i] * e2.y);
    }
    f(px, py, out);
    for (std::size_t i = 0; i < s.size(); ++i) out[i] *= jac * s[i];
  };
  return integrate_square(mapped, abs_tol, initial_level);
}

}  // namespace lorentz::quad
