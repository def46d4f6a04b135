#include "lorentz/detail/reference_kernels.hpp"
#include "lorentz/kernels.hpp"

namespace lorentz::kernels {

namespace {

NearestHit nearest_hit_scalar(const CircleBatch& batch, double ox, double oy, double dx,
                              double dy) {
  const auto hit = detail::nearest_hit_reference<double>(batch.cx, batch.cy, batch.r2,
                                                         batch.size, ox, oy, dx, dy);
  return {hit.t, hit.index};
}

void triangle_kernel_scalar(std::span<const double> a, std::span<const double> b,
                            std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = detail::triangle_kernel_one(a[i], b[i]);
}

void importance_ratio_scalar(std::span<const double> u, std::span<const double> v,
                             std::span<const double> w, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = detail::importance_ratio_one(u[i], v[i], w[i]);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Backend::scalar, "scalar", &nearest_hit_scalar,
                                 &triangle_kernel_scalar, &importance_ratio_scalar};
  return table;
}

}  // namespace lorentz::kernels
