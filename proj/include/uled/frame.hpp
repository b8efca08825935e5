#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace uled {

/// A calibrated luminance capture (cd/m^2), optionally with CIE 1931 x/y
/// chromaticity planes. All planes are row-major, width * height samples.
struct MeasurementFrame {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<float> luminance;
  std::vector<float> chroma_x;  // empty when absent
  std::vector<float> chroma_y;

  static MeasurementFrame zeros(std::uint32_t width, std::uint32_t height, bool with_chroma = false);

  std::size_t sample_count() const noexcept {
    return static_cast<std::size_t>(width) * height;
  }
  bool has_chroma() const noexcept { return !chroma_x.empty(); }
  std::uint8_t channel_count() const noexcept { return has_chroma() ? 3 : 1; }

  float lum(std::size_t x, std::size_t y) const noexcept { return luminance[y * width + x]; }
  float& lum(std::size_t x, std::size_t y) noexcept { return luminance[y * width + x]; }

  std::span<const float> row(std::size_t y) const noexcept {
    return std::span<const float>(luminance).subspan(y * width, width);
  }

  /// Throws ErrorKind::validation naming the first offending sample index.
  void validate() const;

  bool operator==(const MeasurementFrame&) const = default;
};

struct CellIndex {
  std::size_t row = 0;
  std::size_t col = 0;

  auto operator<=>(const CellIndex&) const = default;
};

/// Ground-truth defect labels for a rows x cols µLED array.
class DefectMap {
 public:
  DefectMap() = default;
  /// Throws ErrorKind::range for an out-of-range index, ErrorKind::format for a duplicate.
  DefectMap(std::size_t rows, std::size_t cols, std::span<const CellIndex> defects = {});

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_defective(std::size_t row, std::size_t col) const noexcept {
    return flags_[row * cols_ + col] != 0;
  }
  std::size_t defect_count() const noexcept { return count_; }
  /// Defective cells in row-major order.
  std::vector<CellIndex> defects() const;

  bool operator==(const DefectMap&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint8_t> flags_;
};

}  // namespace uled
