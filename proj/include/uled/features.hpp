#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "uled/frame.hpp"
#include "uled/grid.hpp"

namespace uled::features {

/// Samples closer than this to a cell's boundary are excluded from its statistics.
inline constexpr double kCellMargin = 2.0;

/// Chromaticity reported when the frame carries no chroma planes.
inline constexpr double kMissingChroma = 0.5;

inline constexpr std::size_t kFeatureCount = 6;

/// Six-dimensional descriptor of one µLED.
struct CellFeatures {
  std::size_t row = 0;
  std::size_t col = 0;
  double mean_l = 0.0;
  double max_l = 0.0;
  double min_l = 0.0;
  double std_l = 0.0;  // population
  double mean_cx = kMissingChroma;
  double mean_cy = kMissingChroma;

  std::array<double, kFeatureCount> values() const noexcept {
    return {mean_l, max_l, min_l, std_l, mean_cx, mean_cy};
  }
};

/// Statistics of every interior cell, row-major. A sample belongs to a cell
/// when its center lies inside the cell rectangle shrunk by kCellMargin.
/// Throws ErrorKind::extraction naming a cell left with no samples, and
/// ErrorKind::dimension when the grid lies outside the frame.
std::vector<CellFeatures> extract(const MeasurementFrame& frame, const grid::PixelGrid& grid);

}  // namespace uled::features
