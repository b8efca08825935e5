// Compiled with -mavx2 only (no -mfma): multiply-add pairs must stay separate
// to match the scalar reference bit for bit.

#include <immintrin.h>

#include <cmath>

#include "uled/simd/kernels.hpp"
#include "warp_pixel.hpp"

namespace uled::simd {
namespace {

void accumulate_columns_avx2(const float* row, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_cvtps_pd(_mm_loadu_ps(row + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), v));
  }
  for (; i < n; ++i) acc[i] += static_cast<double>(row[i]);
}

double sum_row_avx2(const float* row, std::size_t n) {
  __m256d lanes = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) lanes = _mm256_add_pd(lanes, _mm256_cvtps_pd(_mm_loadu_ps(row + i)));
  alignas(32) double l[4];
  _mm256_store_pd(l, lanes);
  double s = (l[0] + l[1]) + (l[2] + l[3]);
  for (; i < n; ++i) s += static_cast<double>(row[i]);
  return s;
}

inline __m128 narrow_mask(__m256d mask) {
  const __m256i picked = _mm256_permutevar8x32_epi32(_mm256_castpd_si256(mask),
                                                     _mm256_setr_epi32(0, 2, 4, 6, 0, 2, 4, 6));
  return _mm_castsi128_ps(_mm256_castsi256_si128(picked));
}

void warp_row_avx2(const float* src, std::uint32_t sw, std::uint32_t sh, const double* h,
                   std::uint32_t y, float* dst, std::uint32_t dw) {
  const double py_s = static_cast<double>(y) + 0.5;
  const __m256d py = _mm256_set1_pd(py_s);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d minus_one = _mm256_set1_pd(-1.0);
  const __m256d horizon = _mm256_set1_pd(1e-12);
  const __m256d width = _mm256_set1_pd(static_cast<double>(sw));
  const __m256d height = _mm256_set1_pd(static_cast<double>(sh));
  const __m256d last_x = _mm256_set1_pd(static_cast<double>(sw) - 1.0);
  const __m256d last_y = _mm256_set1_pd(static_cast<double>(sh) - 1.0);
  const __m256d stride = _mm256_set1_pd(static_cast<double>(sw));
  const __m256d h0 = _mm256_set1_pd(h[0]), h1 = _mm256_set1_pd(h[1]), h2 = _mm256_set1_pd(h[2]);
  const __m256d h3 = _mm256_set1_pd(h[3]), h4 = _mm256_set1_pd(h[4]), h5 = _mm256_set1_pd(h[5]);
  const __m256d h6 = _mm256_set1_pd(h[6]), h7 = _mm256_set1_pd(h[7]), h8 = _mm256_set1_pd(h[8]);
  const __m256d y_row1 = _mm256_mul_pd(h1, py);
  const __m256d y_row2 = _mm256_mul_pd(h4, py);
  const __m256d y_row3 = _mm256_mul_pd(h7, py);

  auto gather = [&](__m256d tx, __m256d ty, __m256d valid) {
    __m256d in = _mm256_and_pd(valid, _mm256_cmp_pd(tx, zero, _CMP_GE_OQ));
    in = _mm256_and_pd(in, _mm256_cmp_pd(tx, last_x, _CMP_LE_OQ));
    in = _mm256_and_pd(in, _mm256_cmp_pd(ty, zero, _CMP_GE_OQ));
    in = _mm256_and_pd(in, _mm256_cmp_pd(ty, last_y, _CMP_LE_OQ));
    const __m256d flat = _mm256_add_pd(_mm256_mul_pd(ty, stride), tx);
    const __m128i index = _mm256_cvttpd_epi32(_mm256_and_pd(flat, in));
    const __m128 v = _mm_mask_i32gather_ps(_mm_setzero_ps(), src, index, narrow_mask(in), 4);
    return _mm256_cvtps_pd(v);
  };

  std::uint32_t x = 0;
  for (; x + 4 <= dw; x += 4) {
    const double bx = static_cast<double>(x);
    const __m256d px = _mm256_add_pd(_mm256_setr_pd(bx, bx + 1.0, bx + 2.0, bx + 3.0), half);
    const __m256d X = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(h0, px), y_row1), h2);
    const __m256d Y = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(h3, px), y_row2), h5);
    const __m256d W = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(h6, px), y_row3), h8);
    const __m256d u = _mm256_sub_pd(_mm256_div_pd(X, W), half);
    const __m256d v = _mm256_sub_pd(_mm256_div_pd(Y, W), half);
    __m256d valid = _mm256_cmp_pd(W, horizon, _CMP_GT_OQ);
    valid = _mm256_and_pd(valid, _mm256_cmp_pd(u, minus_one, _CMP_GT_OQ));
    valid = _mm256_and_pd(valid, _mm256_cmp_pd(u, width, _CMP_LT_OQ));
    valid = _mm256_and_pd(valid, _mm256_cmp_pd(v, minus_one, _CMP_GT_OQ));
    valid = _mm256_and_pd(valid, _mm256_cmp_pd(v, height, _CMP_LT_OQ));

    const __m256d fu = _mm256_floor_pd(u);
    const __m256d fv = _mm256_floor_pd(v);
    const __m256d ax = _mm256_sub_pd(u, fu);
    const __m256d ay = _mm256_sub_pd(v, fv);
    const __m256d x1 = _mm256_add_pd(fu, one);
    const __m256d y1 = _mm256_add_pd(fv, one);

    const __m256d a = gather(fu, fv, valid);
    const __m256d b = gather(x1, fv, valid);
    const __m256d c = gather(fu, y1, valid);
    const __m256d d = gather(x1, y1, valid);

    const __m256d bx_ = _mm256_sub_pd(one, ax);
    const __m256d by_ = _mm256_sub_pd(one, ay);
    const __m256d w00 = _mm256_mul_pd(bx_, by_);
    const __m256d w10 = _mm256_mul_pd(ax, by_);
    const __m256d w01 = _mm256_mul_pd(bx_, ay);
    const __m256d w11 = _mm256_mul_pd(ax, ay);
    __m256d r = _mm256_add_pd(_mm256_mul_pd(w00, a), _mm256_mul_pd(w10, b));
    r = _mm256_add_pd(r, _mm256_mul_pd(w01, c));
    r = _mm256_add_pd(r, _mm256_mul_pd(w11, d));
    r = _mm256_blendv_pd(zero, r, valid);
    _mm_storeu_ps(dst + x, _mm256_cvtpd_ps(r));
  }
  for (; x < dw; ++x) dst[x] = detail::warp_pixel(src, sw, sh, h, py_s, x);
}

void nearest_centroid_avx2(const double* xs, const double* ys, std::size_t n, const double* cx,
                           const double* cy, std::size_t k, std::int32_t* labels, double* dist2) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d px = _mm256_loadu_pd(xs + i);
    const __m256d py = _mm256_loadu_pd(ys + i);
    __m256d dx = _mm256_sub_pd(px, _mm256_set1_pd(cx[0]));
    __m256d dy = _mm256_sub_pd(py, _mm256_set1_pd(cy[0]));
    __m256d best_d = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    __m256d best = _mm256_setzero_pd();
    for (std::size_t j = 1; j < k; ++j) {
      dx = _mm256_sub_pd(px, _mm256_set1_pd(cx[j]));
      dy = _mm256_sub_pd(py, _mm256_set1_pd(cy[j]));
      const __m256d d = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
      const __m256d closer = _mm256_cmp_pd(d, best_d, _CMP_LT_OQ);
      best_d = _mm256_blendv_pd(best_d, d, closer);
      best = _mm256_blendv_pd(best, _mm256_set1_pd(static_cast<double>(j)), closer);
    }
    _mm_storeu_si128(reinterpret_cast<__m128i*>(labels + i), _mm256_cvtpd_epi32(best));
    _mm256_storeu_pd(dist2 + i, best_d);
  }
  if (i < n) scalar_kernels().nearest_centroid(xs + i, ys + i, n - i, cx, cy, k, labels + i, dist2 + i);
}

bool cpu_has_avx2() noexcept {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
}

}  // namespace

const KernelTable* avx2_kernels() noexcept {
  static const KernelTable table{"avx2", accumulate_columns_avx2, sum_row_avx2, warp_row_avx2,
                                 nearest_centroid_avx2};
  static const bool supported = cpu_has_avx2();
  return supported ? &table : nullptr;
}

}  // namespace uled::simd
