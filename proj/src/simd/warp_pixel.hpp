#pragma once

// Reference arithmetic for one warped sample. Shared by the scalar kernel and
// the tail loops of vector kernels; internal linkage keeps each translation
// unit's copy independent of the other's target flags.

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace uled::simd::detail {
namespace {

inline float warp_pixel(const float* src, std::uint32_t sw, std::uint32_t sh, const double* h,
                        double py, std::uint32_t x) {
  const double width = sw, height = sh;
  const double px = static_cast<double>(x) + 0.5;
  const double X = (h[0] * px + h[1] * py) + h[2];
  const double Y = (h[3] * px + h[4] * py) + h[5];
  const double W = (h[6] * px + h[7] * py) + h[8];
  const double u = X / W - 0.5;
  const double v = Y / W - 0.5;
  if (!(W > 1e-12 && u > -1.0 && u < width && v > -1.0 && v < height)) return 0.0f;
  const double fu = std::floor(u);
  const double fv = std::floor(v);
  const double ax = u - fu;
  const double ay = v - fv;
  auto tap = [&](double tx, double ty) -> double {
    if (tx >= 0.0 && tx <= width - 1.0 && ty >= 0.0 && ty <= height - 1.0)
      return static_cast<double>(
          src[static_cast<std::size_t>(ty) * sw + static_cast<std::size_t>(tx)]);
    return 0.0;
  };
  const double a = tap(fu, fv);
  const double b = tap(fu + 1.0, fv);
  const double c = tap(fu, fv + 1.0);
  const double d = tap(fu + 1.0, fv + 1.0);
  const double w00 = (1.0 - ax) * (1.0 - ay);
  const double w10 = ax * (1.0 - ay);
  const double w01 = (1.0 - ax) * ay;
  const double w11 = ax * ay;
  return static_cast<float>(((w00 * a + w10 * b) + w01 * c) + w11 * d);
}

}  // namespace
}  // namespace uled::simd::detail
