#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uled/frame.hpp"

namespace uled::grid {

enum class Axis { x, y };

/// Luminance summed along one image axis. Sample i describes the image column
/// (Axis::x) or row (Axis::y) whose center sits at coordinate i + 0.5.
struct AxisProjection {
  Axis axis = Axis::x;
  std::vector<double> values;

  double total() const noexcept;
};

struct Projections {
  AxisProjection x;  // one entry per column, summed over rows
  AxisProjection y;  // one entry per row, summed over columns
};

Projections project(const MeasurementFrame& frame);

struct GridOptions {
  /// Minimum normalized autocorrelation of the period peak.
  double min_peak = 0.2;
  /// Allowed relative deviation of any edge spacing from the median spacing.
  double spacing_tolerance = 0.25;
};

/// Lag (> 4 samples) of the highest local maximum of the normalized
/// autocorrelation of the mean-subtracted projection, parabolically refined.
/// The projection is first trimmed to the span where it exceeds 10% of its
/// maximum, so dark margins around the emitting area do not dominate.
/// Throws ErrorKind::periodicity when no peak reaches options.min_peak.
double estimate_period(const AxisProjection& projection, const GridOptions& options = {});

/// Cell-edge coordinates (gap centers) along the projection axis, strictly
/// increasing. The lattice phase minimizes the summed [1,2,1]/4-smoothed
/// projection at phase + k * period; each lattice position is then moved to
/// the parabolic-refined local minimum within +-period/4 when that minimum has
/// contrast on both sides. A position without such a minimum is placed whole
/// periods from the nearest refined edge (the lattice position when none
/// exists). Positions span the emitting area plus
/// one edge on each side. Throws ErrorKind::grid for fewer than 3 edges.
std::vector<double> detect_edges(const AxisProjection& projection, double period);

/// Emitting extent of one cell along an axis.
struct Extent {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
};

/// For each interval between consecutive edges, the half-level crossings of
/// the raw projection between the interval floor (lowest sample next to
/// either bounding edge) and its plateau (median of the central half).
std::vector<Extent> measure_extents(const AxisProjection& projection, std::span<const double> edges);

struct CellRect {
  double x0, y0, x1, y1;
};

/// Reconstructed µLED lattice. Cells lie between consecutive edges; a cell is
/// interior when it touches neither the first nor the last edge on either axis.
class PixelGrid {
 public:
  PixelGrid() = default;

  std::size_t rows() const noexcept { return y_edges_.size() - 1; }
  std::size_t cols() const noexcept { return x_edges_.size() - 1; }
  const std::vector<double>& x_edges() const noexcept { return x_edges_; }
  const std::vector<double>& y_edges() const noexcept { return y_edges_; }
  const std::vector<Extent>& x_extents() const noexcept { return x_extents_; }
  const std::vector<Extent>& y_extents() const noexcept { return y_extents_; }
  bool has_extents() const noexcept { return !x_extents_.empty(); }

  bool is_interior(std::size_t row, std::size_t col) const noexcept {
    return row > 0 && col > 0 && row + 1 < rows() && col + 1 < cols();
  }
  std::size_t interior_count() const noexcept;
  /// Interior cells in row-major order.
  std::vector<CellIndex> interior_cells() const;

  /// Region whose samples describe the cell: its emitting extent when
  /// measured, else the rectangle between its edges.
  CellRect cell_rect(std::size_t row, std::size_t col) const noexcept;

 private:
  friend PixelGrid build_grid(std::vector<double>, std::vector<double>, std::vector<Extent>,
                              std::vector<Extent>, const GridOptions&);
  std::vector<double> x_edges_{0.0, 1.0};
  std::vector<double> y_edges_{0.0, 1.0};
  std::vector<Extent> x_extents_;
  std::vector<Extent> y_extents_;
};

/// Validates monotonicity, >= 2 edges per axis and the spacing bound. Throws
/// ErrorKind::grid naming the offending edge pair. Extents, when given, must
/// hold one entry per cell along their axis.
PixelGrid build_grid(std::vector<double> x_edges, std::vector<double> y_edges,
                     std::vector<Extent> x_extents = {}, std::vector<Extent> y_extents = {},
                     const GridOptions& options = {});

struct GridMetrics {
  double mean_cell_width = 0.0;
  double mean_cell_height = 0.0;
  double std_cell_width = 0.0;
  double std_cell_height = 0.0;
  double mean_pitch_x = 0.0;
  double mean_pitch_y = 0.0;
};

/// Mean and population standard deviation of interior cell widths and
/// heights (emitting extents when measured, else edge spacing), plus the mean
/// interior pitch. Throws ErrorKind::metrics without interior cells.
GridMetrics cell_size(const PixelGrid& grid);

/// project -> estimate_period -> detect_edges -> measure_extents -> build_grid.
PixelGrid reconstruct(const MeasurementFrame& frame, const GridOptions& options = {});
PixelGrid reconstruct(const Projections& projections, const GridOptions& options = {});

}  // namespace uled::grid
