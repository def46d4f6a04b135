#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>

#include "lorentz/vec2.hpp"

namespace lorentz::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

/// Globally adaptive 15-point Gauss-Kronrod on [a, b]. Throws
/// QuadratureNonConvergence when `max_intervals` is reached first.
Result integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 std::size_t max_intervals = 4096);

/// Fills out[i] = g(x[i], y[i]) for a batch of points.
using BatchIntegrand =
    std::function<void(std::span<const double> x, std::span<const double> y, std::span<double> out)>;

/// Globally adaptive tensor Gauss-Kronrod (K15 x K15, error against G7 x G7)
/// on the unit square. The square is first cut into 4^initial_level equal
/// pieces; the worst piece is then quartered until the summed error meets
/// `abs_tol`.
Result integrate_square(const BatchIntegrand& g, double abs_tol, int initial_level = 0,
                        std::size_t max_regions = 1 << 16);

/// Triangle with a distinguished vertex.
struct Triangle {
  Vec2 apex;
  Vec2 b;
  Vec2 c;
};

/// Integral over a triangle through the Duffy collapse of the unit square onto
/// it, with the collapsed edge at `apex`: x = apex + s((b - apex) + t(c - b)).
/// The Jacobian factor s cancels a 1/|x - apex| singularity. `f` is batched.
Result integrate_triangle_duffy(const BatchIntegrand& f, const Triangle& tri, double abs_tol,
                                int initial_level = 0);

}  // namespace lorentz::quad
