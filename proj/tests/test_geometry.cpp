#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "support.hpp"
#include "uled/error.hpp"
#include "uled/geometry.hpp"
#include "uled/rng.hpp"
#include "uled/synthgen.hpp"

using namespace uled;
using geometry::Homography;
using geometry::Point;
using geometry::Quad;

namespace {

Quad jittered_square(SplitMix64& rng, double size, double jitter) {
  Quad q{Point{0, 0}, Point{size, 0}, Point{size, size}, Point{0, size}};
  for (auto& p : q) {
    p.x += 100 + (rng.uniform() - 0.5) * jitter;
    p.y += 80 + (rng.uniform() - 0.5) * jitter;
  }
  return q;
}

MeasurementFrame smooth_frame(std::uint32_t w, std::uint32_t h) {
  auto f = MeasurementFrame::zeros(w, h, false);
  for (std::uint32_t y = 0; y < h; ++y)
    for (std::uint32_t x = 0; x < w; ++x)
      f.lum(x, y) = static_cast<float>(1000.0 + 300.0 * std::sin(x / 17.0) * std::cos(y / 23.0) + 2.0 * x);
  return f;
}

}  // namespace

TEST(Homography, FourPointSolveMatchesFullPivotOracle) {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto src = jittered_square(rng, 1500, 300);
    const auto dst = jittered_square(rng, 1400, 300);
    const auto h = geometry::estimate_homography(src, dst);
    std::array<std::array<double, 2>, 4> s{}, d{};
    for (int i = 0; i < 4; ++i) s[i] = {src[i].x, src[i].y}, d[i] = {dst[i].x, dst[i].y};
    const auto ref = oracle::homography_full_pivot(s, d);
    for (int k = 0; k < 20; ++k) {
      const double x = rng.uniform() * 2000, y = rng.uniform() * 2000;
      const auto p = h.apply({x, y});
      const auto q = oracle::apply(ref, x, y);
      ASSERT_NEAR(p.x, q[0], 1e-7 * std::max(1.0, std::abs(q[0])));
      ASSERT_NEAR(p.y, q[1], 1e-7 * std::max(1.0, std::abs(q[1])));
    }
  }
}

TEST(Homography, CorrespondencesRoundTrip) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto src = jittered_square(rng, 1500, 400);
    const auto dst = jittered_square(rng, 1600, 400);
    const auto h = geometry::estimate_homography(src, dst);
    const auto inv = h.inverse();
    for (int i = 0; i < 4; ++i) {
      const auto p = h.apply(src[i]);
      EXPECT_NEAR(p.x, dst[i].x, 1e-9);
      EXPECT_NEAR(p.y, dst[i].y, 1e-9);
      const auto back = inv.apply(p);
      EXPECT_NEAR(back.x, src[i].x, 1e-9);
      EXPECT_NEAR(back.y, src[i].y, 1e-9);
    }
  }
}

TEST(Homography, IdentityCorrespondence) {
  const Quad q{Point{0, 0}, Point{10, 0}, Point{10, 10}, Point{0, 10}};
  const auto h = geometry::estimate_homography(q, q);
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(h.matrix()[i], Homography().matrix()[i], 1e-12);
}

TEST(Homography, PureTranslation) {
  const Quad a{Point{0, 0}, Point{10, 0}, Point{10, 10}, Point{0, 10}};
  Quad b = a;
  for (auto& p : b) p.x += 5, p.y -= 2;
  const auto h = geometry::estimate_homography(a, b);
  const auto p = h.apply({3, 4});
  EXPECT_NEAR(p.x, 8, 1e-12);
  EXPECT_NEAR(p.y, 2, 1e-12);
}

TEST(Homography, CollinearPointsAreSingular) {
  const Quad line{Point{0, 0}, Point{1, 1}, Point{2, 2}, Point{0, 5}};
  const Quad ok{Point{0, 0}, Point{10, 0}, Point{10, 10}, Point{0, 10}};
  try {
    geometry::estimate_homography(line, ok);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::singular);
  }
  EXPECT_THROW(geometry::estimate_homography(ok, line), Error);
}

TEST(Homography, SingularAndHorizonErrors) {
  EXPECT_THROW(Homography::from_matrix({1, 2, 3, 2, 4, 6, 0, 0, 1}), Error);
  EXPECT_THROW(Homography::from_matrix({1, 0, 0, 0, 1, 0, 0, 0, 0}), Error);
  const auto h = Homography::from_matrix({1, 0, 0, 0, 1, 0, 1, 0, 1});
  try {
    h.apply({-1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::horizon);
  }
}

TEST(Homography, CompositionAppliesRightOperandFirst) {
  const auto t = Homography::translation(10, 0);
  const auto r = Homography::rotation(std::numbers::pi / 2);
  const auto p = (t * r).apply({1, 0});
  EXPECT_NEAR(p.x, 10, 1e-12);
  EXPECT_NEAR(p.y, 1, 1e-12);
  const auto q = (r * t).apply({1, 0});
  EXPECT_NEAR(q.x, 0, 1e-12);
  EXPECT_NEAR(q.y, 11, 1e-12);
}

TEST(Homography, RotationAboutCenterFixesCenter) {
  const auto h = Homography::rotation(0.3, {50, 70});
  const auto p = h.apply({50, 70});
  EXPECT_NEAR(p.x, 50, 1e-12);
  EXPECT_NEAR(p.y, 70, 1e-12);
  EXPECT_NEAR(h.determinant(), 1.0, 1e-12);
}

TEST(Warp, IdentityReproducesInputExactly) {
  const auto f = smooth_frame(64, 48);
  const auto g = geometry::warp_frame(f, Homography(), 64, 48);
  for (std::uint32_t y = 1; y + 1 < 48; ++y)
    for (std::uint32_t x = 1; x + 1 < 64; ++x) ASSERT_EQ(g.lum(x, y), f.lum(x, y));
}

TEST(Warp, IntegerTranslationShiftsSamples) {
  const auto f = smooth_frame(64, 48);
  const auto g = geometry::warp_frame(f, Homography::translation(3, -2), 64, 48);
  for (std::uint32_t y = 0; y + 2 < 48; ++y)
    for (std::uint32_t x = 3; x < 64; ++x) ASSERT_EQ(g.lum(x, y), f.lum(x - 3, y + 2));
  EXPECT_EQ(g.lum(0, 10), 0.0f);
  EXPECT_EQ(g.lum(10, 47), 0.0f);
}

TEST(Warp, ForwardThenInverseIsClose) {
  const auto f = smooth_frame(400, 300);
  const auto h = Homography::rotation(0.04, {200, 150}) *
                 Homography::from_matrix({1, 0, 0, 0, 1, 0, 2e-5, 1e-5, 1});
  const auto g = geometry::warp_frame(geometry::warp_frame(f, h, 400, 300), h.inverse(), 400, 300);
  double err = 0, mean = 0;
  std::size_t n = 0;
  for (std::uint32_t y = 30; y < 270; ++y)
    for (std::uint32_t x = 30; x < 370; ++x) {
      err += std::abs(g.lum(x, y) - f.lum(x, y));
      mean += f.lum(x, y);
      ++n;
    }
  EXPECT_LT(err / n, 0.01 * mean / n);
}

TEST(Warp, ChromaPlanesFollow) {
  auto f = smooth_frame(32, 32);
  f.chroma_x.assign(f.sample_count(), 0.25f);
  f.chroma_y.assign(f.sample_count(), 0.75f);
  const auto g = geometry::warp_frame(f, Homography::translation(0.5, 0.25), 32, 32);
  ASSERT_TRUE(g.has_chroma());
  EXPECT_FLOAT_EQ(g.chroma_x[10 * 32 + 10], 0.25f);
  EXPECT_FLOAT_EQ(g.chroma_y[10 * 32 + 10], 0.75f);
}

TEST(Corners, AxisAlignedRectangle) {
  auto f = MeasurementFrame::zeros(100, 80, false);
  for (std::uint32_t y = 20; y < 60; ++y)
    for (std::uint32_t x = 10; x < 90; ++x) f.lum(x, y) = 5.0f;
  const auto q = geometry::detect_corners(f, 0.5);
  // Crossings at the sample-boundary midpoint between 0 and 5.
  EXPECT_NEAR(q[0].x, 10, 1e-9);
  EXPECT_NEAR(q[0].y, 20, 1e-9);
  EXPECT_NEAR(q[2].x, 90, 1e-9);
  EXPECT_NEAR(q[2].y, 60, 1e-9);
}

TEST(Corners, RecoverSyntheticCorners) {
  for (double deg : {0.0, 1.0, 2.5, -2.0}) {
    auto c = testing_support::small_config();
    c.rotation_deg = deg;
    c.perspective_strength = 0.02;
    c.defect_fraction = 0.03;
    const auto r = synth::generate(c);
    const auto q = geometry::detect_corners(r.frame, 0.3);
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(q[i].x, r.corner_points[i].x, 0.75) << deg << " corner " << i;
      EXPECT_NEAR(q[i].y, r.corner_points[i].y, 0.75) << deg << " corner " << i;
    }
  }
}

TEST(Corners, DarkFrameFails) {
  try {
    geometry::detect_corners(MeasurementFrame::zeros(10, 10, false), 0.3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::detection);
  }
}

TEST(RectifiedTarget, RectangleMapsToItself) {
  const Quad q{Point{5, 7}, Point{105, 7}, Point{105, 57}, Point{5, 57}};
  const auto t = geometry::rectified_target(q);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(t[i].x, q[i].x);
    EXPECT_DOUBLE_EQ(t[i].y, q[i].y);
  }
}

TEST(RectifiedTarget, RotatedSquareKeepsSideLength) {
  const auto rot = Homography::rotation(0.2, {50, 50});
  Quad q{Point{0, 0}, Point{100, 0}, Point{100, 100}, Point{0, 100}};
  for (auto& p : q) p = rot.apply(p);
  const auto t = geometry::rectified_target(q);
  EXPECT_NEAR(t[1].x - t[0].x, 100, 1e-9);
  EXPECT_NEAR(t[3].y - t[0].y, 100, 1e-9);
  EXPECT_NEAR(t[0].x, 0, 1e-9);
}
