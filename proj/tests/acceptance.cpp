// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Tolerances are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "support.hpp"
#include "uled/geometry.hpp"
#include "uled/grid.hpp"
#include "uled/io.hpp"
#include "uled/ml.hpp"
#include "uled/pipeline.hpp"
#include "uled/rng.hpp"
#include "uled/synthgen.hpp"

using namespace uled;

namespace {

constexpr double kCellSizeTarget = 23.0;
constexpr double kCellSizeTol = 0.5;
constexpr double kMaxSeconds = 30.0;
constexpr double kMinAccuracy = 0.995;
constexpr double kMaxFnr = 0.01;
constexpr double kDenoisedRelTol = 0.005;
constexpr double kRawShiftRelTol = 0.20;
constexpr double kPcaTol = 1e-9;
constexpr double kHomographyTol = 1e-9;
constexpr double kWarpRoundTripRel = 0.01;
constexpr double kConservationRel = 1e-6;
constexpr double kEdgeTolPx = 1.0;

int failures = 0;

void verdict(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s criterion %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

struct MapCase {
  double rotation_deg;
  double perspective;
};

const MapCase kMaps[] = {{0.0, 0.0}, {1.0, 0.01}, {2.5, 0.02}};

struct Run {
  synth::SynthConfig config;
  synth::SynthResult truth;
  pipeline::Analysis analysis;
  double seconds = 0;
};

Run run_map(const synth::SynthConfig& config) {
  Run r;
  r.config = config;
  r.truth = synth::generate(config);
  const auto t0 = std::chrono::steady_clock::now();
  r.analysis = pipeline::analyze(r.truth.frame, r.truth.defects);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

synth::SynthConfig map_config(const MapCase& m) {
  synth::SynthConfig c;
  c.rotation_deg = m.rotation_deg;
  c.perspective_strength = m.perspective;
  return c;
}

void grid_and_classification() {
  bool size_ok = true, accuracy_ok = true;
  std::string size_detail, accuracy_detail;
  for (const auto& m : kMaps) {
    const auto r = run_map(map_config(m));
    const auto& g = r.analysis.metrics;
    const auto& cm = *r.analysis.confusion;
    size_ok = size_ok && std::abs(g.mean_cell_width - kCellSizeTarget) <= kCellSizeTol &&
              std::abs(g.mean_cell_height - kCellSizeTarget) <= kCellSizeTol && r.seconds < kMaxSeconds;
    accuracy_ok = accuracy_ok && cm.accuracy >= kMinAccuracy && cm.false_positive_rate == 0.0 &&
                  cm.false_negative_rate < kMaxFnr;
    size_detail += fmt("[%.1fdeg p=%.2f: %.3fx%.3f px", m.rotation_deg, m.perspective, g.mean_cell_width,
                       g.mean_cell_height) +
                   fmt(" %.2fs] ", r.seconds);
    accuracy_detail += fmt("[%.1fdeg: acc=%.4f fpr=%.4f fnr=%.4f] ", m.rotation_deg, cm.accuracy,
                           cm.false_positive_rate, cm.false_negative_rate);
  }
  verdict(1, "cell size and runtime", size_ok, size_detail);
  verdict(2, "classification", accuracy_ok, accuracy_detail);
}

void les_statistics() {
  struct Case {
    double f, r, rotation, perspective;
  };
  const Case cases[] = {{0.07, 0.02, 1.0, 0.01}, {0.07, 0.02, 0.0, 0.0}, {0.03, 0.10, 2.5, 0.02}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    auto cfg = map_config({c.rotation, c.perspective});
    cfg.defect_fraction = c.f;
    cfg.defect_residual = c.r;
    const auto run = run_map(cfg);
    const auto& les = run.analysis.les;
    const double denoised_err = les.denoised_mean / run.truth.functional_mean - 1.0;
    const double shift = (les.raw_mean - les.denoised_mean) / les.denoised_mean;
    const double expected = -c.f * (1.0 - c.r);
    ok = ok && std::abs(denoised_err) <= kDenoisedRelTol && std::abs(shift - expected) <= kRawShiftRelTol * std::abs(expected);
    detail += fmt("[f=%.2f r=%.2f: denoised %+.4f%%", c.f, c.r, 100 * denoised_err) +
              fmt(" shift %.5f vs %.5f] ", shift, expected);
  }
  verdict(3, "LES statistics", ok, detail);
}

void pca_oracle() {
  SplitMix64 rng(2024);
  double worst = 0, worst_ortho = 0;
  for (int t = 0; t < 100; ++t) {
    ml::Matrix z(50, 6);
    oracle::Dense dense(50, std::vector<double>(6));
    for (std::size_t i = 0; i < 50; ++i)
      for (std::size_t j = 0; j < 6; ++j) z(i, j) = dense[i][j] = rng.gaussian() * (1.0 + j);
    const auto m = ml::pca_fit(z);
    const auto ref = oracle::classical_jacobi(oracle::covariance(dense));
    for (std::size_t c = 0; c < 2; ++c) {
      worst = std::max(worst, std::abs(m.explained_variance[c] - ref.values[c]));
      double dot = 0;
      for (std::size_t j = 0; j < 6; ++j) dot += m.components(c, j) * ref.vectors[c][j];
      const double sign = dot < 0 ? -1 : 1;
      for (std::size_t j = 0; j < 6; ++j)
        worst = std::max(worst, std::abs(m.components(c, j) - sign * ref.vectors[c][j]));
      for (std::size_t d = 0; d < 2; ++d) {
        double g = 0;
        for (std::size_t j = 0; j < 6; ++j) g += m.components(c, j) * m.components(d, j);
        worst_ortho = std::max(worst_ortho, std::abs(g - (c == d ? 1.0 : 0.0)));
      }
    }
  }
  verdict(4, "PCA vs reference eigensolver", worst <= kPcaTol && worst_ortho <= kPcaTol,
          fmt("max deviation %.3g, max orthonormality error %.3g over 100 matrices", worst, worst_ortho));
}

void kmeans_oracle() {
  SplitMix64 rng(77);
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 3 + rng.below(10);
    ml::Matrix y(n, 2);
    std::vector<std::array<double, 2>> pts(n);
    const double spread = 0.2 + 2.0 * rng.uniform();
    for (std::size_t i = 0; i < n; ++i) {
      const double shift = (i % 2 == 0) ? spread : -spread;
      y(i, 0) = pts[i][0] = rng.gaussian() + shift;
      y(i, 1) = pts[i][1] = rng.gaussian();
    }
    const auto m = ml::kmeans_fit(y);
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (m.labels[i] != m.labels[0]) mask |= 1u << i;
    if (mask == 0 || oracle::partition_inertia(pts, mask) != oracle::best_two_partition(pts)) ++mismatches;
  }
  verdict(5, "k-means vs exhaustive optimum", mismatches == 0, fmt("%.0f of 200 instances differ", mismatches));
}

double frame_mean(const MeasurementFrame& f) {
  double s = 0;
  for (float v : f.luminance) s += v;
  return s / static_cast<double>(f.luminance.size());
}

void geometry_checks() {
  SplitMix64 rng(99);
  double worst = 0;
  for (int t = 0; t < 500; ++t) {
    geometry::Quad src{{{100, 100}, {900, 100}, {900, 700}, {100, 700}}}, dst{};
    for (auto& p : src) p = {p.x + 60 * (rng.uniform() - 0.5), p.y + 60 * (rng.uniform() - 0.5)};
    for (int i = 0; i < 4; ++i) dst[i] = {src[i].x + 80 * (rng.uniform() - 0.5), src[i].y + 80 * (rng.uniform() - 0.5)};
    const auto h = geometry::estimate_homography(src, dst);
    std::array<std::array<double, 2>, 4> s{}, d{};
    for (int i = 0; i < 4; ++i) s[i] = {src[i].x, src[i].y}, d[i] = {dst[i].x, dst[i].y};
    const auto ref = oracle::homography_full_pivot(s, d);
    for (int i = 0; i < 4; ++i) {
      const auto p = h.apply(src[i]);
      worst = std::max({worst, std::abs(p.x - dst[i].x), std::abs(p.y - dst[i].y)});
      const auto back = h.inverse().apply(dst[i]);
      worst = std::max({worst, std::abs(back.x - src[i].x), std::abs(back.y - src[i].y)});
    }
    for (int k = 0; k < 20; ++k) {
      const geometry::Point q{100 + 800 * rng.uniform(), 100 + 600 * rng.uniform()};
      const auto a = h.apply(q);
      const auto b = oracle::apply(ref, q.x, q.y);
      worst = std::max({worst, std::abs(a.x - b[0]), std::abs(a.y - b[1])});
    }
  }

  const std::uint32_t w = 320, hgt = 240;
  auto smooth = MeasurementFrame::zeros(w, hgt, false);
  for (std::uint32_t y = 0; y < hgt; ++y)
    for (std::uint32_t x = 0; x < w; ++x)
      smooth.luminance[y * w + x] = static_cast<float>(100 + 40 * std::sin(x / 17.0) * std::cos(y / 23.0) + 0.1 * x);
  const auto same = geometry::warp_frame(smooth, geometry::Homography::identity(), w, hgt);
  bool identity_ok = true;
  for (std::uint32_t y = 1; y + 1 < hgt; ++y)
    for (std::uint32_t x = 1; x + 1 < w; ++x)
      identity_ok = identity_ok && same.luminance[y * w + x] == smooth.luminance[y * w + x];

  const auto h = geometry::Homography::rotation(0.05, {160, 120}) *
                 geometry::Homography::from_matrix({1, 0, 0, 0, 1, 0, 2e-5, 1e-5, 1});
  const auto there = geometry::warp_frame(smooth, h, w, hgt);
  const auto back = geometry::warp_frame(there, h.inverse(), w, hgt);
  double err = 0;
  std::size_t count = 0;
  for (std::uint32_t y = 40; y < hgt - 40; ++y)
    for (std::uint32_t x = 40; x < w - 40; ++x, ++count)
      err += std::abs(back.luminance[y * w + x] - smooth.luminance[y * w + x]);
  const double rel = err / static_cast<double>(count) / frame_mean(smooth);
  verdict(6, "homography and warp",
          worst <= kHomographyTol && identity_ok && rel < kWarpRoundTripRel,
          fmt("correspondence error %.3g px", worst) + (identity_ok ? ", identity warp exact" : ", identity warp differs") +
              fmt(", round-trip mean error %.4f%% of mean", 100 * rel));
}

void conservation_and_determinism() {
  auto cfg = testing_support::small_config();
  cfg.rotation_deg = 1.5;
  cfg.perspective_strength = 0.01;
  const auto truth = synth::generate(cfg);

  const auto proj = grid::project(truth.frame);
  long double total = 0;
  for (float v : truth.frame.luminance) total += v;
  const double rel_x = std::abs(proj.x.total() - static_cast<double>(total)) / static_cast<double>(total);
  const double rel_y = std::abs(proj.y.total() - static_cast<double>(total)) / static_cast<double>(total);
  const bool conserved = rel_x <= kConservationRel && rel_y <= kConservationRel;

  testing_support::TempDir dir("acceptance");
  io::write_frame(truth.frame, dir / "frame.ulf");
  io::write_defect_map(truth.defects, dir / "truth.csv");
  pipeline::PipelineConfig pc;
  pc.frame_path = dir / "frame.ulf";
  pc.defects_path = dir / "truth.csv";
  pc.output_dir = dir / "first";
  pipeline::run(pc);
  pc.output_dir = dir / "second";
  pipeline::run(pc);
  const bool identical = io::read_text(dir / "first/report.json") == io::read_text(dir / "second/report.json");

  const auto a = pipeline::analyze(truth.frame, truth.defects);
  ml::KMeansConfig one = a.kmeans.config, many = a.kmeans.config;
  one.threads = 1;
  many.threads = 8;
  const auto k1 = ml::kmeans_fit(a.principal, one);
  const auto k8 = ml::kmeans_fit(a.principal, many);
  const bool thread_free = k1.labels == k8.labels && k1.centroids == k8.centroids && k1.inertia == k8.inertia;

  verdict(7, "conservation and determinism", conserved && identical && thread_free,
          fmt("projection sums off by %.3g / %.3g relative", rel_x, rel_y) +
              (identical ? ", reports identical" : ", reports differ") +
              (thread_free ? ", threaded k-means identical" : ", threaded k-means differs"));
}

void clustered_defects() {
  bool ok = true;
  std::string detail;
  for (const auto& m : {MapCase{0.0, 0.0}, MapCase{1.0, 0.01}}) {
    auto cfg = map_config(m);
    std::vector<CellIndex> block;
    for (std::size_t r = 29; r < 31; ++r)
      for (std::size_t c = 28; c < 32; ++c) block.push_back({r, c});
    cfg.defect_list = block;
    const auto run = run_map(cfg);
    const auto& a = run.analysis;
    // Ideal edges carried into the rectified frame.
    const auto to_rectified = a.rectification * synth::distortion(cfg);
    const auto ex = synth::ideal_edges_x(cfg), ey = synth::ideal_edges_y(cfg);
    const double cx = 0.5 * (ex.front() + ex.back()), cy = 0.5 * (ey.front() + ey.back());
    double worst = 0;
    bool counts = a.grid.x_edges().size() == ex.size() && a.grid.y_edges().size() == ey.size();
    for (std::size_t i = 0; counts && i < ex.size(); ++i)
      worst = std::max(worst, std::abs(a.grid.x_edges()[i] - to_rectified.apply({ex[i], cy}).x));
    for (std::size_t i = 0; counts && i < ey.size(); ++i)
      worst = std::max(worst, std::abs(a.grid.y_edges()[i] - to_rectified.apply({cx, ey[i]}).y));
    ok = ok && counts && worst <= kEdgeTolPx && a.confusion->accuracy == 1.0;
    detail += fmt("[%.1fdeg: max edge error %.3f px, accuracy %.4f] ", m.rotation_deg, worst, a.confusion->accuracy);
  }
  verdict(8, "contiguous defect cluster", ok, detail);
}

template <typename F>
void guarded(int id, const char* name, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    verdict(id, name, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded(1, "cell size and classification", grid_and_classification);
  guarded(3, "LES statistics", les_statistics);
  guarded(4, "PCA vs reference eigensolver", pca_oracle);
  guarded(5, "k-means vs exhaustive optimum", kmeans_oracle);
  guarded(6, "homography and warp", geometry_checks);
  guarded(7, "conservation and determinism", conservation_and_determinism);
  guarded(8, "contiguous defect cluster", clustered_defects);
  std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
