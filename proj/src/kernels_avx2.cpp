// Compiled with -mavx2 (and never -mfma); only reached after a CPUID check.

#include <immintrin.h>

#include <limits>

#include "lorentz/detail/reference_kernels.hpp"
#include "lorentz/kernels.hpp"

namespace lorentz::kernels {

namespace {

NearestHit nearest_hit_avx2(const CircleBatch& batch, double ox, double oy, double dx,
                            double dy) {
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  const __m256d zero = _mm256_setzero_pd();
  const __m256d vox = _mm256_set1_pd(ox);
  const __m256d voy = _mm256_set1_pd(oy);
  const __m256d vdx = _mm256_set1_pd(dx);
  const __m256d vdy = _mm256_set1_pd(dy);
  const __m256d step = _mm256_set1_pd(double(kPad));

  __m256d best_t = inf;
  __m256d best_i = _mm256_set1_pd(-1.0);
  __m256d lane_i = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  for (std::size_t j = 0; j < batch.size; j += kPad) {
    const __m256d px = _mm256_sub_pd(vox, _mm256_loadu_pd(batch.cx + j));
    const __m256d py = _mm256_sub_pd(voy, _mm256_loadu_pd(batch.cy + j));
    const __m256d b = _mm256_add_pd(_mm256_mul_pd(px, vdx), _mm256_mul_pd(py, vdy));
    const __m256d c = _mm256_sub_pd(_mm256_add_pd(_mm256_mul_pd(px, px), _mm256_mul_pd(py, py)),
                                    _mm256_loadu_pd(batch.r2 + j));
    const __m256d disc = _mm256_sub_pd(_mm256_mul_pd(b, b), c);
    const __m256d valid =
        _mm256_and_pd(_mm256_cmp_pd(b, zero, _CMP_LT_OQ), _mm256_cmp_pd(disc, zero, _CMP_GT_OQ));
    const __m256d t = _mm256_div_pd(c, _mm256_sub_pd(_mm256_sqrt_pd(disc), b));
    const __m256d cand = _mm256_blendv_pd(inf, t, valid);
    const __m256d better = _mm256_cmp_pd(cand, best_t, _CMP_LT_OQ);
    best_t = _mm256_blendv_pd(best_t, cand, better);
    best_i = _mm256_blendv_pd(best_i, lane_i, better);
    lane_i = _mm256_add_pd(lane_i, step);
  }

  alignas(32) double ts[4];
  alignas(32) double is[4];
  _mm256_store_pd(ts, best_t);
  _mm256_store_pd(is, best_i);
  NearestHit best{std::numeric_limits<double>::infinity(), -1};
  for (int l = 0; l < 4; ++l) {
    if (is[l] < 0) continue;
    const int idx = static_cast<int>(is[l]);
    if (ts[l] < best.t || (ts[l] == best.t && idx < best.index)) best = {ts[l], idx};
  }
  return best;
}

void triangle_kernel_avx2(std::span<const double> a, std::span<const double> b,
                          std::span<double> out) {
  const __m256d one = _mm256_set1_pd(1.0);
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a.data() + i);
    const __m256d vb = _mm256_loadu_pd(b.data() + i);
    const __m256d s = _mm256_add_pd(va, vb);
    const __m256d d = _mm256_add_pd(_mm256_mul_pd(va, vb), _mm256_mul_pd(s, _mm256_sub_pd(one, s)));
    _mm256_storeu_pd(out.data() + i, _mm256_div_pd(one, d));
  }
  for (; i < n; ++i) out[i] = detail::triangle_kernel_one(a[i], b[i]);
}

void importance_ratio_avx2(std::span<const double> u, std::span<const double> v,
                           std::span<const double> w, std::span<double> out) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d six = _mm256_set1_pd(6.0);
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vu = _mm256_loadu_pd(u.data() + i);
    const __m256d vv = _mm256_loadu_pd(v.data() + i);
    const __m256d vw = _mm256_loadu_pd(w.data() + i);
    const __m256d s = _mm256_add_pd(_mm256_add_pd(vu, vv), vw);
    const __m256d pairs = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(vu, vv), _mm256_mul_pd(vu, vw)), _mm256_mul_pd(vv, vw));
    const __m256d f = _mm256_div_pd(_mm256_sub_pd(one, s), pairs);
    const __m256d radial = _mm256_div_pd(one, _mm256_mul_pd(s, s));
    const __m256d eu = _mm256_div_pd(
        one, _mm256_mul_pd(_mm256_sub_pd(one, vu), _mm256_add_pd(vv, vw)));
    const __m256d ev = _mm256_div_pd(
        one, _mm256_mul_pd(_mm256_sub_pd(one, vv), _mm256_add_pd(vu, vw)));
    const __m256d ew = _mm256_div_pd(
        one, _mm256_mul_pd(_mm256_sub_pd(one, vw), _mm256_add_pd(vu, vv)));
    const __m256d edges = _mm256_div_pd(_mm256_add_pd(_mm256_add_pd(eu, ev), ew), six);
    _mm256_storeu_pd(out.data() + i, _mm256_div_pd(f, _mm256_add_pd(radial, edges)));
  }
  for (; i < n; ++i) out[i] = detail::importance_ratio_one(u[i], v[i], w[i]);
}

}  // namespace

const KernelTable& avx2_kernels_unchecked() {
  static const KernelTable table{Backend::avx2, "avx2", &nearest_hit_avx2,
                                 &triangle_kernel_avx2, &importance_ratio_avx2};
  return table;
}

}  // namespace lorentz::kernels
