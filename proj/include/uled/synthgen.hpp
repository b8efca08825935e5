#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "uled/frame.hpp"
#include "uled/geometry.hpp"

namespace uled::synth {

/// Parameters for a synthetic µLED capture. Defaults describe a 60 x 60 array
/// with 23 px emitters on a 26 px pitch inside a 2448 x 2050 frame.
struct SynthConfig {
  std::uint32_t frame_width = 2448;
  std::uint32_t frame_height = 2050;
  std::size_t grid_rows = 60;
  std::size_t grid_cols = 60;
  double cell_size_px = 23.0;
  double gap_px = 3.0;
  double lum_mean = 2.8e6;   // cd/m^2
  double lum_sigma = 1.4e5;  // per-cell brightness spread
  double defect_fraction = 0.03;
  std::optional<std::vector<CellIndex>> defect_list;  // overrides defect_fraction
  double defect_residual = 0.02;
  double rotation_deg = 0.0;
  double perspective_strength = 0.0;
  double noise_sigma = 2.8e4;  // additive, per sample
  double chroma_mean_x = 0.31;
  double chroma_mean_y = 0.33;
  double chroma_sigma = 0.002;
  std::uint64_t seed = 1;

  double pitch() const noexcept { return cell_size_px + gap_px; }
  double les_width() const noexcept { return static_cast<double>(grid_cols) * pitch(); }
  double les_height() const noexcept { return static_cast<double>(grid_rows) * pitch(); }

  /// Throws ErrorKind::config on any violated invariant.
  void validate() const;
};

struct Rect {
  double x0, y0, x1, y1;  // half-open [x0, x1) x [y0, y1)
};

/// Undistorted frame coordinates of the LES's top-left corner; the LES
/// (including its half-gap border) is centered in the frame.
geometry::Point les_origin(const SynthConfig& config);

/// One rectangle per cell, row-major, in undistorted frame coordinates. Layout:
/// half-gap border, then cells on a pitch of cell_size_px + gap_px.
std::vector<Rect> ideal_cell_rectangles(const SynthConfig& config);

/// Positions of the gap centers (cell edges) along each axis, undistorted:
/// grid_cols + 1 values for x, grid_rows + 1 for y.
std::vector<double> ideal_edges_x(const SynthConfig& config);
std::vector<double> ideal_edges_y(const SynthConfig& config);

/// Map from undistorted to distorted frame coordinates:
/// rotation about the frame center, then a keystone term whose bottom row is
/// (p / les_width, p / (2 les_height), 1) in LES-centered coordinates.
geometry::Homography distortion(const SynthConfig& config);

struct SynthResult {
  MeasurementFrame frame;
  DefectMap defects;
  /// Distorted images of the emitting area's corners (outer corners of the
  /// outermost cells), ordered TL, TR, BR, BL.
  geometry::Quad corner_points;
  /// Per-cell drawn brightness before defects are applied, row-major.
  std::vector<double> cell_brightness;
  /// Mean drawn brightness over non-defective cells.
  double functional_mean = 0.0;
};

/// Random draws, in order: defect selection (partial Fisher-Yates over
/// round(defect_fraction * cells) cells, skipped for an explicit list), one
/// Gaussian brightness per cell, chroma x then y per cell, then one Gaussian
/// noise value per output sample in row-major order.
SynthResult generate(const SynthConfig& config);

}  // namespace uled::synth
