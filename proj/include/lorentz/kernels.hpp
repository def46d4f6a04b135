#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and an AVX2
// variant; the variant is chosen once at runtime. Both variants perform the
// same IEEE operations in the same order, so their results are bit-identical.

#include <cstddef>
#include <span>
#include <string_view>

namespace lorentz::kernels {

enum class Backend { scalar, avx2 };

/// Lane count every candidate array is padded to.
inline constexpr std::size_t kPad = 4;

struct NearestHit {
  double t;
  int index;  // -1 when no candidate is hit
};

/// Candidate circles in structure-of-arrays form, relative to the ray's cell.
struct CircleBatch {
  const double* cx;
  const double* cy;
  const double* r2;
  std::size_t size;  // multiple of kPad
};

/// Entry parameter of the ray o + t d into the nearest circle it approaches
/// (b = <o - c, d> < 0) and crosses (discriminant > 0). Ties go to the lower
/// index. `d` must be a unit vector.
using NearestHitFn = NearestHit (*)(const CircleBatch&, double ox, double oy, double dx,
                                    double dy);

/// out[i] = 1 / (a b + (a + b)(1 - a - b)), the reduced J integrand on the
/// barycentric triangle.
using TriangleKernelFn = void (*)(std::span<const double> a, std::span<const double> b,
                                  std::span<double> out);

/// out[i] = f(u,v,w) / q(u,v,w): the J integrand over the mixture sampling
/// density used by the Monte-Carlo estimator.
using ImportanceRatioFn = void (*)(std::span<const double> u, std::span<const double> v,
                                   std::span<const double> w, std::span<double> out);

struct KernelTable {
  Backend backend;
  std::string_view name;
  NearestHitFn nearest_hit;
  TriangleKernelFn triangle_kernel;
  ImportanceRatioFn importance_ratio;
};

const KernelTable& scalar_kernels();

/// AVX2 table, or nullptr when it was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Best supported table. `LORENTZ_LAB_KERNEL=scalar|avx2` overrides.
const KernelTable& active();

}  // namespace lorentz::kernels
