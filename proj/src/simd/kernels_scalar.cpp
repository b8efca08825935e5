#include <cmath>

#include "uled/simd/kernels.hpp"
#include "warp_pixel.hpp"

namespace uled::simd {
namespace {

void accumulate_columns_scalar(const float* row, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += static_cast<double>(row[i]);
}

double sum_row_scalar(const float* row, std::size_t n) {
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    l0 += static_cast<double>(row[i]);
    l1 += static_cast<double>(row[i + 1]);
    l2 += static_cast<double>(row[i + 2]);
    l3 += static_cast<double>(row[i + 3]);
  }
  double s = (l0 + l1) + (l2 + l3);
  for (; i < n; ++i) s += static_cast<double>(row[i]);
  return s;
}

void warp_row_scalar(const float* src, std::uint32_t sw, std::uint32_t sh, const double* h,
                     std::uint32_t y, float* dst, std::uint32_t dw) {
  const double py = static_cast<double>(y) + 0.5;
  for (std::uint32_t x = 0; x < dw; ++x) dst[x] = detail::warp_pixel(src, sw, sh, h, py, x);
}

void nearest_centroid_scalar(const double* xs, const double* ys, std::size_t n,
                             const double* cx, const double* cy, std::size_t k,
                             std::int32_t* labels, double* dist2) {
  for (std::size_t i = 0; i < n; ++i) {
    std::int32_t best = 0;
    double dx = xs[i] - cx[0], dy = ys[i] - cy[0];
    double best_d = dx * dx + dy * dy;
    for (std::size_t j = 1; j < k; ++j) {
      dx = xs[i] - cx[j];
      dy = ys[i] - cy[j];
      const double d = dx * dx + dy * dy;
      if (d < best_d) {
        best_d = d;
        best = static_cast<std::int32_t>(j);
      }
    }
    labels[i] = best;
    dist2[i] = best_d;
  }
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{"scalar", accumulate_columns_scalar, sum_row_scalar,
                                 warp_row_scalar, nearest_centroid_scalar};
  return table;
}

}  // namespace uled::simd
