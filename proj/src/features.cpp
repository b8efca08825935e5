#include "uled/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "uled/error.hpp"
#include "uled/parallel.hpp"

namespace uled::features {
namespace {

struct SampleRange {
  std::size_t first = 0, last = 0;  // inclusive
  bool empty = true;
};

SampleRange centers_in(double lo, double hi, std::size_t n) {
  SampleRange r;
  const double a = std::max(0.0, std::ceil(lo - 0.5));
  const double b = std::min(static_cast<double>(n) - 1.0, std::floor(hi - 0.5));
  if (a > b) return r;
  r.first = static_cast<std::size_t>(a);
  r.last = static_cast<std::size_t>(b);
  r.empty = false;
  return r;
}

}  // namespace

std::vector<CellFeatures> extract(const MeasurementFrame& frame, const grid::PixelGrid& grid) {
  frame.validate();
  if (grid.x_edges().front() >= frame.width || grid.x_edges().back() <= 0 ||
      grid.y_edges().front() >= frame.height || grid.y_edges().back() <= 0)
    throw Error(ErrorKind::dimension, "grid lies outside the frame");

  const auto cells = grid.interior_cells();
  std::vector<CellFeatures> out(cells.size());
  const bool chroma = frame.has_chroma();

  parallel_for(cells.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto [row, col] = cells[i];
      const auto rect = grid.cell_rect(row, col);
      const auto xs = centers_in(rect.x0 + kCellMargin, rect.x1 - kCellMargin, frame.width);
      const auto ys = centers_in(rect.y0 + kCellMargin, rect.y1 - kCellMargin, frame.height);
      if (xs.empty || ys.empty)
        throw Error(ErrorKind::extraction, "cell (" + std::to_string(row) + "," +
                                               std::to_string(col) + ") has no samples inside its margin");
      CellFeatures f;
      f.row = row;
      f.col = col;
      double sum = 0.0, sum_cx = 0.0, sum_cy = 0.0;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t y = ys.first; y <= ys.last; ++y)
        for (std::size_t x = xs.first; x <= xs.last; ++x) {
          const std::size_t k = y * frame.width + x;
          const double v = frame.luminance[k];
          sum += v;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
          if (chroma) {
            sum_cx += frame.chroma_x[k];
            sum_cy += frame.chroma_y[k];
          }
        }
      const double count = static_cast<double>((xs.last - xs.first + 1) * (ys.last - ys.first + 1));
      f.mean_l = sum / count;
      double var = 0.0;
      for (std::size_t y = ys.first; y <= ys.last; ++y)
        for (std::size_t x = xs.first; x <= xs.last; ++x) {
          const double d = frame.luminance[y * frame.width + x] - f.mean_l;
          var += d * d;
        }
      f.std_l = std::sqrt(var / count);
      // Rounding can leave the mean an ulp outside [min, max] for constant cells.
      f.mean_l = std::clamp(f.mean_l, lo, hi);
      f.max_l = hi;
      f.min_l = lo;
      if (chroma) {
        f.mean_cx = std::clamp(sum_cx / count, 0.0, 1.0);
        f.mean_cy = std::clamp(sum_cy / count, 0.0, 1.0);
      }
      out[i] = f;
    }
  });
  return out;
}

}  // namespace uled::features
