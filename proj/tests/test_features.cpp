#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "uled/error.hpp"
#include "uled/features.hpp"
#include "uled/rng.hpp"
#include "uled/synthgen.hpp"

using namespace uled;

namespace {

std::vector<double> even_edges(double start, double step, std::size_t count) {
  std::vector<double> e(count);
  for (std::size_t i = 0; i < count; ++i) e[i] = start + step * i;
  return e;
}

MeasurementFrame random_frame(std::uint32_t w, std::uint32_t h, bool chroma, std::uint64_t seed) {
  auto f = MeasurementFrame::zeros(w, h, chroma);
  SplitMix64 rng(seed);
  for (auto& v : f.luminance) v = static_cast<float>(rng.uniform() * 1e6);
  for (auto& v : f.chroma_x) v = static_cast<float>(rng.uniform());
  for (auto& v : f.chroma_y) v = static_cast<float>(rng.uniform());
  return f;
}

}  // namespace

TEST(Extract, ConstantCell) {
  auto f = MeasurementFrame::zeros(78, 78, true);
  std::fill(f.luminance.begin(), f.luminance.end(), 7.0f);
  std::fill(f.chroma_x.begin(), f.chroma_x.end(), 0.25f);
  std::fill(f.chroma_y.begin(), f.chroma_y.end(), 0.5f);
  const auto g = grid::build_grid(even_edges(0, 26, 4), even_edges(0, 26, 4));
  const auto cells = features::extract(f, g);
  ASSERT_EQ(cells.size(), 1u);
  const auto& c = cells[0];
  EXPECT_EQ(c.row, 1u);
  EXPECT_EQ(c.col, 1u);
  EXPECT_EQ(c.mean_l, 7.0);
  EXPECT_EQ(c.max_l, 7.0);
  EXPECT_EQ(c.min_l, 7.0);
  EXPECT_EQ(c.std_l, 0.0);
  EXPECT_EQ(c.mean_cx, 0.25);
  EXPECT_EQ(c.mean_cy, 0.5);
}

TEST(Extract, TwoSampleCell) {
  auto f = MeasurementFrame::zeros(18, 15, false);
  // Interior cell [6,12) x [5,10); the margin leaves samples (8,7) and (9,7).
  f.lum(8, 7) = 1.0f;
  f.lum(9, 7) = 3.0f;
  const auto g = grid::build_grid(even_edges(0, 6, 4), even_edges(0, 5, 4));
  const auto c = features::extract(f, g).at(0);
  EXPECT_EQ(c.mean_l, 2.0);
  EXPECT_EQ(c.max_l, 3.0);
  EXPECT_EQ(c.min_l, 1.0);
  EXPECT_EQ(c.std_l, 1.0);
  EXPECT_EQ(c.mean_cx, features::kMissingChroma);
  EXPECT_EQ(c.mean_cy, features::kMissingChroma);
}

TEST(Extract, InvariantsHoldOnRandomFrames) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = random_frame(200, 180, seed % 2 == 0, seed);
    const auto g = grid::build_grid(even_edges(3.3, 19.7, 10), even_edges(1.1, 17.2, 10));
    const auto cells = features::extract(f, g);
    ASSERT_EQ(cells.size(), g.interior_count());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& c = cells[i];
      ASSERT_LE(c.min_l, c.mean_l);
      ASSERT_LE(c.mean_l, c.max_l);
      ASSERT_GE(c.std_l, 0.0);
      ASSERT_LE(c.std_l, (c.max_l - c.min_l) / 2 * (1 + 1e-12));
      ASSERT_GE(c.mean_cx, 0.0);
      ASSERT_LE(c.mean_cx, 1.0);
      ASSERT_GE(c.mean_cy, 0.0);
      ASSERT_LE(c.mean_cy, 1.0);
      if (i > 0) {
        ASSERT_TRUE(cells[i - 1].row < c.row || (cells[i - 1].row == c.row && cells[i - 1].col < c.col));
      }
    }
  }
}

TEST(Extract, LuminanceScalingIsLinear) {
  const auto f = random_frame(120, 120, true, 3);
  const auto g = grid::build_grid(even_edges(0, 24, 6), even_edges(0, 24, 6));
  const auto base = features::extract(f, g);
  for (float alpha : {4.0f, 0.25f, 3.0f}) {
    auto scaled = f;
    for (auto& v : scaled.luminance) v *= alpha;
    const auto s = features::extract(scaled, g);
    // Powers of two scale every operation exactly; other factors round once per sample.
    const double tol = (alpha == 3.0f) ? 1e-6 : 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_NEAR(s[i].mean_l, alpha * base[i].mean_l, tol * alpha * base[i].mean_l);
      EXPECT_NEAR(s[i].max_l, alpha * base[i].max_l, tol * alpha * base[i].max_l);
      EXPECT_NEAR(s[i].min_l, alpha * base[i].min_l, tol * alpha * base[i].min_l);
      EXPECT_NEAR(s[i].std_l, alpha * base[i].std_l, tol * alpha * base[i].std_l);
      EXPECT_EQ(s[i].mean_cx, base[i].mean_cx);
      EXPECT_EQ(s[i].mean_cy, base[i].mean_cy);
    }
  }
}

TEST(Extract, CellWithoutSamplesIsNamed) {
  const auto f = random_frame(12, 12, false, 1);
  const auto g = grid::build_grid(even_edges(0, 3, 4), even_edges(0, 3, 4));
  try {
    features::extract(f, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::extraction);
    EXPECT_NE(std::string(e.what()).find("(1,1)"), std::string::npos) << e.what();
  }
}

TEST(Extract, GridOutsideFrame) {
  const auto f = random_frame(20, 20, false, 1);
  const auto g = grid::build_grid(even_edges(100, 10, 4), even_edges(0, 10, 4));
  try {
    features::extract(f, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dimension);
  }
}

TEST(Extract, DefectCellsCarryResidualBrightness) {
  auto c = testing_support::small_config();
  c.noise_sigma = 0;
  c.defect_fraction = 0.1;
  const auto r = synth::generate(c);
  const auto g = grid::reconstruct(r.frame);
  ASSERT_EQ(g.cols(), c.grid_cols);
  const auto cells = features::extract(r.frame, g);
  std::size_t defects_seen = 0;
  for (const auto& f : cells) {
    const double drawn = r.cell_brightness[f.row * c.grid_cols + f.col];
    const bool defect = r.defects.is_defective(f.row, f.col);
    const double expected = defect ? c.defect_residual * drawn : drawn;
    EXPECT_NEAR(f.mean_l, expected, 1e-6 * expected) << f.row << "," << f.col;
    EXPECT_NEAR(f.std_l, 0.0, 1e-6 * expected);
    defects_seen += defect;
  }
  EXPECT_GT(defects_seen, 10u);
}
