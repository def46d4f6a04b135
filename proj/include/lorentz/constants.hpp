#pragma once

#include <cstdint>
#include <string>

#include "lorentz/estimators.hpp"
#include "lorentz/geometry.hpp"

namespace lorentz {

/// Dilogarithm Li2(x) = sum_{k>=1} x^k / k^2 on [-1, 1]. Direct series for
/// |x| <= 1/2; reflection for x > 1/2 and Landen's identity for x < -1/2.
double li2(double x);

/// Li2 by plain summation of the first `terms` terms (reference only).
double li2_series(double x, std::uint64_t terms);

struct IntegralI {
  double quadrature;
  double quadrature_error;
  double closed_form;  // pi^2/12 + 1/4 - (3/2) log 2
};

/// I = int_{1/2}^{1} (1-u)^2/u log(u/(1-u)) du, by adaptive quadrature and in
/// closed form.
IntegralI integral_I();

/// int_{0<=u<=r<=s<=1} (1-s)/(r s) du dr ds with the u-integral done
/// analytically and the rest by nested adaptive quadrature. Equals 1/2.
double integral_simplex_check();

struct McEstimate {
  double mean;
  double stderr_;
  std::uint64_t samples;
};

/// Monte-Carlo estimate of the same ordered-simplex integral, sampling a
/// defensive mixture of the uniform density and 1/(r s).
McEstimate integral_simplex_check_mc(std::uint64_t samples, std::uint64_t seed,
                                     unsigned workers = 1);

enum class JMethod { cubature, monte_carlo };

struct JEstimate {
  double value;
  double error;  // cubature error estimate, or Monte-Carlo standard error
  JMethod method;
  std::uint64_t evaluations;
};

struct JOptions {
  double target_err = 1e-4;
  /// Cubature: number of uniform quarterings applied before adapting.
  int initial_level = 0;
  /// Monte-Carlo stream.
  std::uint64_t seed = 0x5eed;
  unsigned workers = 1;
  std::uint64_t max_samples = 20'000'000'000ULL;
};

/// J = int over {u,v,w >= 0, u+v+w <= 1} of (1 - (u+v+w)) / (uv + uw + vw).
///
/// cubature: writing (u,v,w) = s (a,b,c) with a+b+c = 1 separates the radial
/// factor (the integrand is homogeneous of degree -2, the volume element
/// s^2 ds dA), leaving J = (1/2) int_T dA / (ab + ac + bc). The three simplex
/// edges where two coordinates vanish become the three vertices of T, each a
/// 1/distance singularity. T is split at its edge midpoints and each corner
/// piece is Duffy-collapsed at its singular vertex.
///
/// monte_carlo: importance sampling directly in (u,v,w) from a mixture of a
/// radial density 2/s^2 and three edge densities 1/((1-x_e)(s-x_e)); runs
/// until the standard error is at most target_err.
JEstimate integral_J(JMethod method, const JOptions& options = {});

/// Both methods; throws MethodDisagreement beyond 3 combined errors.
struct JCrossCheck {
  JEstimate cubature;
  JEstimate monte_carlo;
  double z_score;
};
JCrossCheck integral_J_cross_check(const JOptions& options = {});

/// (pi^2/6 - 1)/2: J must exceed this for c to be positive.
double j_positivity_threshold();

struct ConstantsReport {
  double perimeter_factor;  // sum |dO_i|^2 / (sum |dO_i|)^2
  double c0, c0_err;
  double c1, c1_err;
  double J, J_err;
  double c, c_err;
  double I_closed, I_quad;
  DiffusionMatrix sigma2;
  std::string notes;
};

/// c0 = sum|dO_i|^2 / ((sum|dO_i|)^2 pi sqrt(det Sigma^2)), c1 = c0/2,
/// c = c0^2 (1 + 2J - pi^2/6); errors by first-order propagation.
ConstantsReport theoretical_constants(const BilliardTable& table, const DiffusionMatrix& sigma2,
                                      const JEstimate& J);

}  // namespace lorentz
