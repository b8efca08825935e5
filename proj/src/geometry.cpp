#include "uled/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "uled/error.hpp"
#include "uled/parallel.hpp"
#include "uled/simd/kernels.hpp"

namespace uled::geometry {
namespace {

using Mat3 = std::array<double, 9>;

Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r[i * 3 + j] = a[i * 3] * b[j] + a[i * 3 + 1] * b[3 + j] + a[i * 3 + 2] * b[6 + j];
  return r;
}

double det3(const Mat3& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double distance(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

void require_no_collinear_triple(const Quad& q, const char* which) {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k) {
        const double scale = distance(q[i], q[j]) * distance(q[i], q[k]);
        if (!(std::abs(cross(q[i], q[j], q[k])) > 1e-12 * scale))
          throw Error(ErrorKind::singular, std::string("collinear correspondence points in ") + which);
      }
}

// Similarity taking the centroid to the origin and the mean radius to sqrt(2).
Mat3 normalizing_transform(const Quad& q) {
  double cx = 0, cy = 0;
  for (const auto& p : q) cx += p.x, cy += p.y;
  cx /= 4;
  cy /= 4;
  double mean_r = 0;
  for (const auto& p : q) mean_r += std::hypot(p.x - cx, p.y - cy);
  mean_r /= 4;
  const double s = std::sqrt(2.0) / mean_r;
  return {s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1};
}

Point transform(const Mat3& m, Point p) {
  const double w = m[6] * p.x + m[7] * p.y + m[8];
  return {(m[0] * p.x + m[1] * p.y + m[2]) / w, (m[3] * p.x + m[4] * p.y + m[5]) / w};
}

std::array<double, 8> solve8(std::array<std::array<double, 9>, 8> a) {
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-14) throw Error(ErrorKind::singular, "degenerate homography system");
    std::swap(a[pivot], a[col]);
    for (int r = col + 1; r < 8; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 9; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::array<double, 8> x{};
  for (int r = 7; r >= 0; --r) {
    double s = a[r][8];
    for (int c = r + 1; c < 8; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

struct Line {
  // Points p with n . p == d.
  double nx, ny, d;
};

std::optional<Point> intersect(const Line& a, const Line& b) {
  const double det = a.nx * b.ny - a.ny * b.nx;
  if (std::abs(det) < 1e-12) return std::nullopt;
  return Point{(a.d * b.ny - a.ny * b.d) / det, (a.nx * b.d - a.d * b.nx) / det};
}

std::vector<Point> convex_hull(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Refits a line to the candidates within `band` of it (total least squares),
// keeping the normal's orientation. Candidates within `trim` of either end of
// the side are dropped; near a corner the neighbouring side's crossings also
// fall inside the band.
Line refine_line(const Line& seed, const std::vector<Point>& candidates, double band, double trim) {
  std::vector<Point> near;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& p : candidates)
    if (std::abs(seed.nx * p.x + seed.ny * p.y - seed.d) <= band) {
      near.push_back(p);
      const double along = seed.nx * p.y - seed.ny * p.x;
      lo = std::min(lo, along);
      hi = std::max(hi, along);
    }
  std::erase_if(near, [&](Point p) {
    const double along = seed.nx * p.y - seed.ny * p.x;
    return along < lo + trim || along > hi - trim;
  });
  if (near.size() < 3) return seed;
  double sx = 0, sy = 0;
  for (const auto& p : near) sx += p.x, sy += p.y;
  const double mx = sx / near.size(), my = sy / near.size();
  double cxx = 0, cxy = 0, cyy = 0;
  for (const auto& p : near) {
    const double dx = p.x - mx, dy = p.y - my;
    cxx += dx * dx, cxy += dx * dy, cyy += dy * dy;
  }
  // Normal = eigenvector of the scatter matrix with the smaller eigenvalue.
  const double theta = 0.5 * std::atan2(2 * cxy, cxx - cyy);
  double nx = -std::sin(theta), ny = std::cos(theta);
  if (nx * seed.nx + ny * seed.ny < 0) nx = -nx, ny = -ny;
  return {nx, ny, nx * mx + ny * my};
}

}  // namespace

Homography Homography::from_matrix(const std::array<double, 9>& m) {
  double scale = 0;
  for (double v : m) scale = std::max(scale, std::abs(v));
  if (!(std::abs(m[8]) > 1e-12 * scale))
    throw Error(ErrorKind::singular, "homography bottom-right entry vanishes");
  Homography h;
  for (int i = 0; i < 9; ++i) h.m_[i] = m[i] / m[8];
  h.m_[8] = 1.0;
  if (!(std::abs(h.determinant()) > 1e-12)) throw Error(ErrorKind::singular, "homography is not invertible");
  return h;
}

Homography Homography::translation(double tx, double ty) {
  return from_matrix({1, 0, tx, 0, 1, ty, 0, 0, 1});
}

Homography Homography::rotation(double radians, Point c) {
  const double cs = std::cos(radians), sn = std::sin(radians);
  return from_matrix({cs, -sn, c.x - cs * c.x + sn * c.y, sn, cs, c.y - sn * c.x - cs * c.y, 0, 0, 1});
}

double Homography::determinant() const noexcept { return det3(m_); }

Homography Homography::inverse() const {
  const auto& m = m_;
  const double det = det3(m);
  if (!(std::abs(det) > 1e-12)) throw Error(ErrorKind::singular, "homography is not invertible");
  const Mat3 adj{m[4] * m[8] - m[5] * m[7], m[2] * m[7] - m[1] * m[8], m[1] * m[5] - m[2] * m[4],
                 m[5] * m[6] - m[3] * m[8], m[0] * m[8] - m[2] * m[6], m[2] * m[3] - m[0] * m[5],
                 m[3] * m[7] - m[4] * m[6], m[1] * m[6] - m[0] * m[7], m[0] * m[4] - m[1] * m[3]};
  return from_matrix(adj);
}

Homography Homography::operator*(const Homography& rhs) const {
  return from_matrix(multiply(m_, rhs.m_));
}

Point Homography::apply(Point p) const {
  const double w = m_[6] * p.x + m_[7] * p.y + m_[8];
  if (std::abs(w) <= 1e-12) throw Error(ErrorKind::horizon, "point maps to the line at infinity");
  return {(m_[0] * p.x + m_[1] * p.y + m_[2]) / w, (m_[3] * p.x + m_[4] * p.y + m_[5]) / w};
}

Homography estimate_homography(const Quad& src, const Quad& dst) {
  require_no_collinear_triple(src, "source quad");
  require_no_collinear_triple(dst, "destination quad");
  const Mat3 ts = normalizing_transform(src);
  const Mat3 td = normalizing_transform(dst);

  std::array<std::array<double, 9>, 8> a{};
  for (int i = 0; i < 4; ++i) {
    const Point s = transform(ts, src[i]);
    const Point d = transform(td, dst[i]);
    a[2 * i] = {s.x, s.y, 1, 0, 0, 0, -s.x * d.x, -s.y * d.x, d.x};
    a[2 * i + 1] = {0, 0, 0, s.x, s.y, 1, -s.x * d.y, -s.y * d.y, d.y};
  }
  const auto h = solve8(a);
  const Mat3 hn{h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0};
  const Mat3 td_inv = Homography::from_matrix(td).inverse().matrix();
  return Homography::from_matrix(multiply(td_inv, multiply(hn, ts)));
}

MeasurementFrame warp_frame(const MeasurementFrame& frame, const Homography& h,
                            std::uint32_t out_width, std::uint32_t out_height) {
  frame.validate();
  if (out_width == 0 || out_height == 0) throw Error(ErrorKind::input, "warp output must be non-empty");
  const auto inverse = h.inverse().matrix();
  const auto& kernels = simd::active_kernels();
  MeasurementFrame out = MeasurementFrame::zeros(out_width, out_height, frame.has_chroma());

  auto warp_plane = [&](const std::vector<float>& src, std::vector<float>& dst) {
    parallel_for(out_height, [&](std::size_t begin, std::size_t end) {
      for (std::size_t y = begin; y < end; ++y)
        kernels.warp_row(src.data(), frame.width, frame.height, inverse.data(),
                         static_cast<std::uint32_t>(y), dst.data() + y * out_width, out_width);
    });
  };
  warp_plane(frame.luminance, out.luminance);
  if (frame.has_chroma()) {
    warp_plane(frame.chroma_x, out.chroma_x);
    warp_plane(frame.chroma_y, out.chroma_y);
  }
  return out;
}

Quad detect_corners(const MeasurementFrame& frame, double rel_threshold) {
  if (!(rel_threshold > 0.0 && rel_threshold < 1.0))
    throw Error(ErrorKind::input, "corner threshold must lie in (0, 1)");
  frame.validate();
  const float peak = *std::max_element(frame.luminance.begin(), frame.luminance.end());
  if (!(peak > 0.0f)) throw Error(ErrorKind::detection, "frame has no luminance above zero");
  const double t = rel_threshold * peak;
  const std::size_t w = frame.width, h = frame.height;

  std::vector<Point> candidates;
  auto value = [&](std::size_t x, std::size_t y) { return static_cast<double>(frame.lum(x, y)); };
  // Linear interpolation of the threshold crossing between sample centers.
  auto rise = [&](double before, double at) { return (t - before) / (at - before); };

  for (std::size_t y = 0; y < h; ++y) {
    std::size_t first = w, last = w;
    for (std::size_t x = 0; x < w; ++x)
      if (value(x, y) >= t) {
        if (first == w) first = x;
        last = x;
      }
    if (first == w) continue;
    const double yc = y + 0.5;
    const double left = first == 0 ? 0.0 : (first - 0.5) + rise(value(first - 1, y), value(first, y));
    const double right = last + 1 == w ? double(w) : (last + 1.5) - rise(value(last + 1, y), value(last, y));
    candidates.push_back({left, yc});
    candidates.push_back({right, yc});
  }
  for (std::size_t x = 0; x < w; ++x) {
    std::size_t first = h, last = h;
    for (std::size_t y = 0; y < h; ++y)
      if (value(x, y) >= t) {
        if (first == h) first = y;
        last = y;
      }
    if (first == h) continue;
    const double xc = x + 0.5;
    const double top = first == 0 ? 0.0 : (first - 0.5) + rise(value(x, first - 1), value(x, first));
    const double bottom = last + 1 == h ? double(h) : (last + 1.5) - rise(value(x, last + 1), value(x, last));
    candidates.push_back({xc, top});
    candidates.push_back({xc, bottom});
  }

  const auto hull = convex_hull(candidates);
  if (hull.size() < 4) throw Error(ErrorKind::detection, "fewer than 4 boundary candidates above threshold");

  Point centroid{};
  for (const auto& p : hull) centroid.x += p.x, centroid.y += p.y;
  centroid.x /= hull.size();
  centroid.y /= hull.size();

  // Side classes: 0 top, 1 right, 2 bottom, 3 left (image y grows downward).
  std::array<std::optional<Line>, 4> sides;
  std::array<double, 4> best_len{};
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point a = hull[i], b = hull[(i + 1) % hull.size()];
    const double len = distance(a, b);
    if (len <= 0) continue;
    double nx = -(b.y - a.y) / len, ny = (b.x - a.x) / len;
    const Point mid{(a.x + b.x) / 2, (a.y + b.y) / 2};
    if (nx * (mid.x - centroid.x) + ny * (mid.y - centroid.y) < 0) nx = -nx, ny = -ny;
    int cls;
    if (std::abs(nx) >= std::abs(ny))
      cls = nx > 0 ? 1 : 3;
    else
      cls = ny > 0 ? 2 : 0;
    if (len > best_len[cls]) {
      best_len[cls] = len;
      sides[cls] = Line{nx, ny, nx * a.x + ny * a.y};
    }
  }
  for (int s = 0; s < 4; ++s) {
    if (!sides[s]) throw Error(ErrorKind::detection, "could not find all four sides of the emitting area");
    sides[s] = refine_line(*sides[s], candidates, 0.5, 2.0);
  }
  const auto tl = intersect(*sides[0], *sides[3]);
  const auto tr = intersect(*sides[0], *sides[1]);
  const auto br = intersect(*sides[2], *sides[1]);
  const auto bl = intersect(*sides[2], *sides[3]);
  if (!tl || !tr || !br || !bl) throw Error(ErrorKind::detection, "emitting-area sides are parallel");
  return {*tl, *tr, *br, *bl};
}

Quad rectified_target(const Quad& c) {
  const double w = 0.5 * (distance(c[0], c[1]) + distance(c[3], c[2]));
  const double h = 0.5 * (distance(c[0], c[3]) + distance(c[1], c[2]));
  const double cx = 0.25 * (c[0].x + c[1].x + c[2].x + c[3].x);
  const double cy = 0.25 * (c[0].y + c[1].y + c[2].y + c[3].y);
  return {Point{cx - w / 2, cy - h / 2}, Point{cx + w / 2, cy - h / 2}, Point{cx + w / 2, cy + h / 2},
          Point{cx - w / 2, cy + h / 2}};
}

}  // namespace uled::geometry
