#pragma once

#include <array>
#include <cstdint>

#include "uled/frame.hpp"

namespace uled::geometry {

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

/// Corner order everywhere: top-left, top-right, bottom-right, bottom-left.
using Quad = std::array<Point, 4>;

/// Invertible planar projective map, stored row-major with m[8] == 1.
class Homography {
 public:
  /// Identity.
  Homography() = default;

  /// Normalizes by the bottom-right entry. Throws ErrorKind::singular when that
  /// entry vanishes or |det| <= 1e-12 after normalization.
  static Homography from_matrix(const std::array<double, 9>& m);
  static Homography identity() { return Homography(); }
  static Homography translation(double tx, double ty);
  /// Rotation by `radians` about `center`.
  static Homography rotation(double radians, Point center = {});

  const std::array<double, 9>& matrix() const noexcept { return m_; }
  double operator()(int row, int col) const noexcept { return m_[row * 3 + col]; }
  double determinant() const noexcept;

  Homography inverse() const;

  /// Composition: (a * b).apply(p) == a.apply(b.apply(p)).
  Homography operator*(const Homography& rhs) const;

  /// Throws ErrorKind::horizon when the homogeneous w is within 1e-12 of 0.
  Point apply(Point p) const;

 private:
  std::array<double, 9> m_{1, 0, 0, 0, 1, 0, 0, 0, 1};
};

/// Exactly-determined four-point solve (8x8 system, partial pivoting, on
/// similarity-normalized coordinates). Throws ErrorKind::singular when three
/// points of either quad are collinear.
Homography estimate_homography(const Quad& src, const Quad& dst);

inline Point apply_homography(const Homography& h, Point p) { return h.apply(p); }

/// Output sample (x, y) is the bilinear interpolation of the input at
/// h^-1(x + 0.5, y + 0.5), zero outside. Chroma planes are warped the same way.
MeasurementFrame warp_frame(const MeasurementFrame& frame, const Homography& h,
                            std::uint32_t out_width, std::uint32_t out_height);

/// Corners of the quadrilateral bounding every sample >= rel_threshold * max
/// luminance. The four sides are supporting lines of the convex hull of
/// sub-pixel threshold crossings; each side is the longest hull edge whose
/// outward normal falls in that side's quadrant. Throws ErrorKind::detection
/// for an empty (or all-dark) frame or when a side has no hull edge.
Quad detect_corners(const MeasurementFrame& frame, double rel_threshold);

/// Axis-aligned target for rectifying `corners`: width and height are the
/// mean lengths of opposite sides, centered on the corners' centroid.
Quad rectified_target(const Quad& corners);

}  // namespace uled::geometry
