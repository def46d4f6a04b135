#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lorentz/constants.hpp"
#include "lorentz/error.hpp"
#include "support.hpp"

using namespace lorentz;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;
// Independent high-precision evaluation (50 digits) of the J integral.
constexpr double kJOracle = 1.1719536193447294;

// Antiderivative of (1-u)^2/u log(u/(1-u)); tends to pi^2/6 + 1/2 at u = 1.
double antiderivative(double u) {
  const double lu = std::log(u), l1u = std::log1p(-u);
  return li2(u) + 0.5 * (u + lu * (u * u + lu - 4 * u) + l1u * (-u * u + 4 * u - 3));
}

}  // namespace

TEST_SUITE("constants") {
  TEST_CASE("li2 at the special points") {
    CHECK(std::abs(li2(1.0) - kPi * kPi / 6) < 1e-14);
    CHECK(std::abs(li2(0.5) - (kPi * kPi / 12 - kLn2 * kLn2 / 2)) < 1e-14);
    CHECK(std::abs(li2(-1.0) + kPi * kPi / 12) < 1e-14);
    CHECK(li2(0.0) == 0.0);
    CHECK_THROWS_AS(li2(1.5), DomainError);
    CHECK_THROWS_AS(li2(NAN), DomainError);
  }

  TEST_CASE("li2 identities against slow direct summation") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.5, 1.0);
    for (int i = 0; i < 100; ++i) {
      const double x = u(rng);
      CHECK(std::abs(li2_series(x, 1000000) - li2(x)) < 1e-10);
    }
    for (double x : {-0.99, -0.75, -0.51, -0.3, 0.1, 0.49}) {
      CHECK(std::abs(li2_series(x, 1000000) - li2(x)) < 1e-12);
    }
  }

  TEST_CASE("I by quadrature, closed form and antiderivative") {
    const auto I = integral_I();
    const double closed = kPi * kPi / 12 + 0.25 - 1.5 * kLn2;
    CHECK(I.closed_form == closed);
    CHECK(std::abs(I.quadrature - closed) < 1e-8);
    CHECK(std::abs(I.quadrature - closed) < 1e-13);
    const double via_f = kPi * kPi / 6 + 0.5 - antiderivative(0.5);
    CHECK(std::abs(via_f - closed) < 1e-14);
    // The antiderivative's value approaches its limit at 1.
    CHECK(std::abs(antiderivative(1 - 1e-9) - (kPi * kPi / 6 + 0.5)) < 1e-6);
  }

  TEST_CASE("ordered simplex integral is 1/2") {
    CHECK(std::abs(integral_simplex_check() - 0.5) < 1e-8);
    const auto mc = integral_simplex_check_mc(1 << 20, 7, 1);
    CHECK(std::abs(mc.mean - 0.5) < 4 * mc.stderr_);
    CHECK(mc.samples == (1u << 20));
    CHECK(integral_simplex_check_mc(100000, 7, 1).mean == integral_simplex_check_mc(100000, 7, 4).mean);
  }

  TEST_CASE("J by cubature against the frozen oracle") {
    JOptions o;
    o.target_err = 1e-6;
    const auto j = integral_J(JMethod::cubature, o);
    CHECK(std::abs(j.value - kJOracle) < 1e-9);
    CHECK(j.error <= 1e-6);
    CHECK(j.value > j_positivity_threshold());
    CHECK(j_positivity_threshold() == doctest::Approx(0.322467).epsilon(1e-6));
  }

  TEST_CASE("J cubature is stable under refinement doubling") {
    JOptions a, b;
    a.target_err = b.target_err = 1e-6;
    a.initial_level = 1;
    b.initial_level = 2;
    const auto ja = integral_J(JMethod::cubature, a);
    const auto jb = integral_J(JMethod::cubature, b);
    CHECK(std::abs(ja.value - jb.value) < 1e-6);
    CHECK(jb.evaluations > ja.evaluations);
  }

  TEST_CASE("J by Monte Carlo, coarse") {
    JOptions o;
    o.target_err = 1e-3;
    const auto j = integral_J(JMethod::monte_carlo, o);
    CHECK(j.error <= 1e-3);
    CHECK(std::abs(j.value - kJOracle) < 4 * j.error);
    o.workers = 3;
    CHECK(integral_J(JMethod::monte_carlo, o).value == j.value);
    o.target_err = 1e-5;
    CHECK_THROWS_AS(integral_J(JMethod::monte_carlo, o), ConfigError);
  }

  TEST_CASE("constants from a planted identity sigma2") {
    const auto table = testing::single_disk(0.5, 0.5, 0.25);
    const auto sigma = DiffusionMatrix::make({1, 0, 1}, {}, SigmaMethod::given);
    JEstimate J{kJOracle, 0.0, JMethod::cubature, 0};
    const auto r = theoretical_constants(table, sigma, J);
    CHECK(r.perimeter_factor == 1.0);
    CHECK(r.c0 == doctest::Approx(1 / kPi).epsilon(1e-15));
    CHECK(r.c1 == r.c0 / 2);
    CHECK(r.c == r.c0 * r.c0 * (1 + 2 * J.value - kPi * kPi / 6));
    CHECK(r.c > 0);
    CHECK(r.c0_err == 0.0);
  }

  TEST_CASE("report invariants on the default table with error propagation") {
    const auto table = default_table();
    const auto sigma = DiffusionMatrix::make({0.0035, 0.0001, 0.0036}, {1e-4, 1e-4, 1e-4},
                                             SigmaMethod::empirical);
    JEstimate J{kJOracle, 1e-4, JMethod::monte_carlo, 0};
    const auto r = theoretical_constants(table, sigma, J);
    CHECK(r.perimeter_factor == doctest::Approx(25.0 / 49.0).epsilon(1e-15));
    CHECK(r.c0 == doctest::Approx(25.0 / 49.0 / (kPi * sigma.sqrt_det)).epsilon(1e-15));
    CHECK(r.c1 == r.c0 / 2);
    CHECK(r.c1_err == r.c0_err / 2);
    CHECK(r.c0_err == doctest::Approx(r.c0 * sigma.sqrt_det_stderr() / sigma.sqrt_det));
    CHECK(r.c > 0);
    CHECK(r.c_err > 2 * r.c0 * r.c0 * J.error);
    CHECK(r.I_closed == doctest::Approx(r.I_quad).epsilon(1e-12));
  }
}
