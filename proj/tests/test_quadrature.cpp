#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lorentz/error.hpp"
#include "lorentz/quadrature.hpp"

using namespace lorentz;

namespace {

quad::BatchIntegrand pointwise(double (*f)(double, double)) {
  return [f](std::span<const double> x, std::span<const double> y, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i], y[i]);
  };
}

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("degree 13 is accepted on one interval") {
    // Both the 7-point Gauss and 15-point Kronrod rules are exact here.
    const auto r = quad::integrate([](double x) { return std::pow(x, 13); }, 0.0, 1.0, 1e-14);
    CHECK(r.value == doctest::Approx(1.0 / 14).epsilon(1e-14));
    CHECK(r.evaluations == 15);
    const auto h = quad::integrate([](double x) { return std::pow(x, 29); }, 0.0, 1.0, 1e-14);
    CHECK(h.value == doctest::Approx(1.0 / 30).epsilon(1e-14));
  }

  TEST_CASE("endpoint singularities") {
    const auto a = quad::integrate([](double x) { return std::log(x); }, 0.0, 1.0, 1e-12);
    CHECK(a.value == doctest::Approx(-1.0).epsilon(1e-11));
    const auto b = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
    CHECK(b.value == doctest::Approx(2.0).epsilon(1e-9));
  }

  TEST_CASE("non-convergence is reported") {
    CHECK_THROWS_AS(quad::integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, 1e-12, 50),
                    QuadratureNonConvergence);
  }

  TEST_CASE("tensor rule on the square") {
    const auto r = quad::integrate_square(
        pointwise([](double x, double y) { return std::exp(x + y); }), 1e-12);
    const double e1 = std::numbers::e - 1;
    CHECK(r.value == doctest::Approx(e1 * e1).epsilon(1e-12));
    // Corner singularity in the derivative.
    const auto s = quad::integrate_square(
        pointwise([](double x, double y) { return std::sqrt(x + y); }), 1e-10);
    CHECK(s.value == doctest::Approx(4.0 / 15.0 * (std::pow(2.0, 2.5) - 2)).epsilon(1e-9));
  }

  TEST_CASE("duffy collapse integrates 1/r over a corner triangle") {
    const quad::Triangle t{{0, 0}, {1, 0}, {0, 1}};
    const auto r = quad::integrate_triangle_duffy(
        pointwise([](double x, double y) { return 1.0 / std::hypot(x, y); }), t, 1e-12);
    // int_0^{pi/2} dtheta / (cos + sin) = sqrt(2) log(1 + sqrt(2))
    CHECK(r.value == doctest::Approx(std::sqrt(2.0) * std::log(1 + std::sqrt(2.0))).epsilon(1e-11));
  }

  TEST_CASE("duffy collapse gives the area for a constant") {
    const quad::Triangle t{{0.2, 0.1}, {0.9, 0.3}, {0.4, 0.8}};
    const auto r = quad::integrate_triangle_duffy(
        pointwise([](double, double) { return 1.0; }), t, 1e-14);
    const double area = 0.5 * std::abs((0.9 - 0.2) * (0.8 - 0.1) - (0.4 - 0.2) * (0.3 - 0.1));
    CHECK(r.value == doctest::Approx(area).epsilon(1e-14));
  }
}
