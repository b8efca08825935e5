#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and, where the
// build and CPU allow, an AVX2 variant. Every variant follows the same
// floating-point operation order as the scalar reference, so results are
// bit-identical regardless of which table is active.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace uled::simd {

struct KernelTable {
  std::string_view name;

  /// acc[i] += double(row[i]) for i in [0, n).
  void (*accumulate_columns)(const float* row, double* acc, std::size_t n);

  /// Sum of double(row[i]). Order: four strided lane accumulators over the
  /// largest multiple-of-4 prefix, combined as (l0 + l1) + (l2 + l3), then the
  /// tail added left to right.
  double (*sum_row)(const float* row, std::size_t n);

  /// One output row of an inverse-mapped bilinear warp. `inverse` is the
  /// row-major 3x3 map from output to source coordinates; sample centers sit
  /// at (x + 0.5, y + 0.5). Out-of-range taps read as zero; samples whose
  /// source lies entirely outside, or behind the horizon, are zero.
  void (*warp_row)(const float* src, std::uint32_t src_width, std::uint32_t src_height,
                   const double* inverse, std::uint32_t y, float* dst, std::uint32_t dst_width);

  /// For each 2-D point, the index of the nearest centroid (ties go to the
  /// lowest index) and the squared distance to it.
  void (*nearest_centroid)(const double* xs, const double* ys, std::size_t n,
                           const double* cx, const double* cy, std::size_t k,
                           std::int32_t* labels, double* dist2);
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the library was built without AVX2 or the CPU lacks it.
const KernelTable* avx2_kernels() noexcept;

/// The table used by the library. Chosen once from ULED_INSPECT_SIMD
/// ("scalar", "avx2", or unset for the best available), unless overridden.
const KernelTable& active_kernels() noexcept;

/// Test hook: force a table (nullptr restores automatic selection).
void override_kernels(const KernelTable* table) noexcept;

}  // namespace uled::simd
