#include "uled/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "uled/error.hpp"
#include "uled/rng.hpp"

namespace uled::synth {
namespace {

struct Coverage {
  std::size_t index;
  double fraction;
};

double overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

// For every pixel along an axis, the cells (by index) it overlaps and by how much.
std::vector<std::vector<Coverage>> axis_coverage(std::size_t pixels, double origin, double pitch,
                                                 double gap, double cell, std::size_t cells) {
  std::vector<std::vector<Coverage>> out(pixels);
  for (std::size_t c = 0; c < cells; ++c) {
    const double lo = origin + gap / 2 + c * pitch;
    const double hi = lo + cell;
    const auto first = static_cast<std::size_t>(std::max(0.0, std::floor(lo)));
    const auto last = std::min<std::size_t>(pixels, static_cast<std::size_t>(std::ceil(hi)));
    for (std::size_t p = first; p < last; ++p) {
      const double f = overlap(p, p + 1.0, lo, hi);
      if (f > 0) out[p].push_back({c, f});
    }
  }
  return out;
}

void fail(const std::string& what) { throw Error(ErrorKind::config, what); }

}  // namespace

void SynthConfig::validate() const {
  if (frame_width == 0 || frame_height == 0) fail("frame dimensions must be positive");
  if (grid_rows == 0 || grid_cols == 0) fail("grid dimensions must be positive");
  if (!(cell_size_px > 0)) fail("cell_size_px must be positive");
  if (!(gap_px >= 0 && gap_px < cell_size_px)) fail("gap_px must satisfy 0 <= gap_px < cell_size_px");
  if (!(lum_mean > 0) || !std::isfinite(lum_mean)) fail("lum_mean must be positive");
  if (!(lum_sigma >= 0) || !(noise_sigma >= 0) || !(chroma_sigma >= 0)) fail("sigmas must be >= 0");
  if (!(defect_fraction >= 0 && defect_fraction < 1)) fail("defect_fraction must lie in [0, 1)");
  if (!(defect_residual >= 0 && defect_residual < 1)) fail("defect_residual must lie in [0, 1)");
  if (!std::isfinite(rotation_deg)) fail("rotation_deg must be finite");
  if (!(perspective_strength >= 0) || !std::isfinite(perspective_strength))
    fail("perspective_strength must be >= 0");
  if (!(chroma_mean_x >= 0 && chroma_mean_x <= 1 && chroma_mean_y >= 0 && chroma_mean_y <= 1))
    fail("chroma means must lie in [0, 1]");
  if (les_width() > frame_width || les_height() > frame_height)
    fail("emitting area (" + std::to_string(les_width()) + " x " + std::to_string(les_height()) +
         " px) does not fit the frame");
  if (defect_list)
    for (const auto& d : *defect_list)
      if (d.row >= grid_rows || d.col >= grid_cols) fail("defect list entry outside the grid");
}

geometry::Point les_origin(const SynthConfig& c) {
  return {(c.frame_width - c.les_width()) / 2.0, (c.frame_height - c.les_height()) / 2.0};
}

std::vector<Rect> ideal_cell_rectangles(const SynthConfig& c) {
  c.validate();
  const auto o = les_origin(c);
  std::vector<Rect> rects;
  rects.reserve(c.grid_rows * c.grid_cols);
  for (std::size_t r = 0; r < c.grid_rows; ++r)
    for (std::size_t col = 0; col < c.grid_cols; ++col) {
      const double x0 = o.x + c.gap_px / 2 + col * c.pitch();
      const double y0 = o.y + c.gap_px / 2 + r * c.pitch();
      rects.push_back({x0, y0, x0 + c.cell_size_px, y0 + c.cell_size_px});
    }
  return rects;
}

std::vector<double> ideal_edges_x(const SynthConfig& c) {
  const auto o = les_origin(c);
  std::vector<double> e(c.grid_cols + 1);
  for (std::size_t i = 0; i <= c.grid_cols; ++i) e[i] = o.x + i * c.pitch();
  return e;
}

std::vector<double> ideal_edges_y(const SynthConfig& c) {
  const auto o = les_origin(c);
  std::vector<double> e(c.grid_rows + 1);
  for (std::size_t i = 0; i <= c.grid_rows; ++i) e[i] = o.y + i * c.pitch();
  return e;
}

geometry::Homography distortion(const SynthConfig& c) {
  using geometry::Homography;
  const geometry::Point center{c.frame_width / 2.0, c.frame_height / 2.0};
  const double p = c.perspective_strength;
  const auto keystone = Homography::from_matrix(
      {1, 0, 0, 0, 1, 0, p / c.les_width(), p / (2 * c.les_height()), 1});
  const auto to_center = Homography::translation(-center.x, -center.y);
  const auto back = Homography::translation(center.x, center.y);
  const auto rotate = Homography::rotation(c.rotation_deg * std::numbers::pi / 180.0);
  return back * rotate * keystone * to_center;
}

SynthResult generate(const SynthConfig& c) {
  c.validate();
  SplitMix64 rng(c.seed);
  const std::size_t cells = c.grid_rows * c.grid_cols;

  std::vector<CellIndex> defect_cells;
  if (c.defect_list) {
    defect_cells = *c.defect_list;
  } else {
    const auto count = static_cast<std::size_t>(std::llround(c.defect_fraction * cells));
    std::vector<std::size_t> order(cells);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) std::swap(order[i], order[i + rng.below(cells - i)]);
    for (std::size_t i = 0; i < count; ++i) defect_cells.push_back({order[i] / c.grid_cols, order[i] % c.grid_cols});
  }
  SynthResult result;
  result.defects = DefectMap(c.grid_rows, c.grid_cols, defect_cells);

  result.cell_brightness.resize(cells);
  for (auto& b : result.cell_brightness) b = std::max(0.0, c.lum_mean + c.lum_sigma * rng.gaussian());
  std::vector<double> cell_cx(cells), cell_cy(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    cell_cx[i] = std::clamp(c.chroma_mean_x + c.chroma_sigma * rng.gaussian(), 0.0, 1.0);
    cell_cy[i] = std::clamp(c.chroma_mean_y + c.chroma_sigma * rng.gaussian(), 0.0, 1.0);
  }

  double functional_sum = 0;
  std::size_t functional_count = 0;
  std::vector<double> emitted(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const bool defective = result.defects.is_defective(i / c.grid_cols, i % c.grid_cols);
    emitted[i] = defective ? result.cell_brightness[i] * c.defect_residual : result.cell_brightness[i];
    if (!defective) functional_sum += result.cell_brightness[i], ++functional_count;
  }
  result.functional_mean = functional_count ? functional_sum / functional_count : 0.0;

  const auto origin = les_origin(c);
  const auto cov_x = axis_coverage(c.frame_width, origin.x, c.pitch(), c.gap_px, c.cell_size_px, c.grid_cols);
  const auto cov_y = axis_coverage(c.frame_height, origin.y, c.pitch(), c.gap_px, c.cell_size_px, c.grid_rows);

  MeasurementFrame ideal = MeasurementFrame::zeros(c.frame_width, c.frame_height, true);
  for (std::size_t y = 0; y < c.frame_height; ++y) {
    for (std::size_t x = 0; x < c.frame_width; ++x) {
      double lum = 0.0, dcx = 0.0, dcy = 0.0;
      for (const auto& ry : cov_y[y])
        for (const auto& cx : cov_x[x]) {
          const std::size_t cell = ry.index * c.grid_cols + cx.index;
          const double f = cx.fraction * ry.fraction;
          lum += emitted[cell] * f;
          dcx += (cell_cx[cell] - c.chroma_mean_x) * f;
          dcy += (cell_cy[cell] - c.chroma_mean_y) * f;
        }
      const std::size_t i = y * c.frame_width + x;
      ideal.luminance[i] = static_cast<float>(lum);
      ideal.chroma_x[i] = static_cast<float>(std::clamp(c.chroma_mean_x + dcx, 0.0, 1.0));
      ideal.chroma_y[i] = static_cast<float>(std::clamp(c.chroma_mean_y + dcy, 0.0, 1.0));
    }
  }

  const auto h = distortion(c);
  if (h.matrix() == geometry::Homography::identity().matrix())
    result.frame = std::move(ideal);
  else
    result.frame = geometry::warp_frame(ideal, h, c.frame_width, c.frame_height);

  if (c.noise_sigma > 0)
    for (auto& v : result.frame.luminance)
      v = static_cast<float>(std::max(0.0, static_cast<double>(v) + c.noise_sigma * rng.gaussian()));

  const double half_gap = c.gap_px / 2;
  const geometry::Quad ideal_corners{
      geometry::Point{origin.x + half_gap, origin.y + half_gap},
      geometry::Point{origin.x + c.les_width() - half_gap, origin.y + half_gap},
      geometry::Point{origin.x + c.les_width() - half_gap, origin.y + c.les_height() - half_gap},
      geometry::Point{origin.x + half_gap, origin.y + c.les_height() - half_gap}};
  for (int i = 0; i < 4; ++i) result.corner_points[i] = h.apply(ideal_corners[i]);
  return result;
}

}  // namespace uled::synth
