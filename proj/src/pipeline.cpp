#include "uled/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <system_error>

#include "uled/io.hpp"
#include "uled/report.hpp"

namespace uled::pipeline {
namespace {

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  } catch (const std::exception& e) {
    throw StageError(name, Error(ErrorKind::io, e.what()));
  }
}

constexpr std::string_view kArtifacts[] = {kReportFile, kProjectionsXFile, kProjectionsYFile, kFeaturesFile,
                                           kOverlayFile};

void remove_artifacts(const std::filesystem::path& dir) {
  std::error_code ec;
  for (auto name : kArtifacts) std::filesystem::remove(dir / name, ec);
}

}  // namespace

void AnalysisOptions::validate() const {
  if (!(rel_threshold > 0.0 && rel_threshold < 1.0))
    throw Error(ErrorKind::config, "rel_threshold must lie in (0, 1)");
  if (!(grid.min_peak > 0.0 && grid.min_peak < 1.0))
    throw Error(ErrorKind::config, "min_peak must lie in (0, 1)");
  if (!(grid.spacing_tolerance > 0.0)) throw Error(ErrorKind::config, "spacing_tolerance must be positive");
  if (kmeans.k < 2) throw Error(ErrorKind::config, "k must be at least 2");
  if (kmeans.n_init == 0) throw Error(ErrorKind::config, "n_init must be positive");
  if (kmeans.max_iter == 0) throw Error(ErrorKind::config, "max_iter must be positive");
  if (!(kmeans.tol >= 0.0)) throw Error(ErrorKind::config, "tol must be non-negative");
  if (!(labels.max_defect_ratio > 0.0 && labels.max_defect_ratio <= 1.0))
    throw Error(ErrorKind::config, "max_defect_ratio must lie in (0, 1]");
  if (corner_mode == CornerMode::explicit_points)
    for (const auto& p : corners)
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Error(ErrorKind::config, "corner points must be finite");
}

Analysis analyze(const MeasurementFrame& frame, const std::optional<DefectMap>& truth,
                 const AnalysisOptions& options) {
  stage("config", [&] { options.validate(); });
  Analysis a;
  a.frame_width = frame.width;
  a.frame_height = frame.height;
  a.truth = truth;
  a.labels = options.labels;

  stage("rectify", [&] {
    frame.validate();
    if (options.corner_mode == CornerMode::none) {
      a.rectified = frame;
      return;
    }
    a.corners = options.corner_mode == CornerMode::automatic
                    ? geometry::detect_corners(frame, options.rel_threshold)
                    : options.corners;
    a.rectification = geometry::estimate_homography(*a.corners, geometry::rectified_target(*a.corners));
    a.rectified = geometry::warp_frame(frame, a.rectification, frame.width, frame.height);
  });
  stage("project", [&] { a.projections = grid::project(a.rectified); });
  stage("grid", [&] {
    a.grid = grid::reconstruct(a.projections, options.grid);
    a.metrics = grid::cell_size(a.grid);
  });
  stage("features", [&] { a.cells = features::extract(a.rectified, a.grid); });
  stage("pca", [&] {
    auto [standardizer, z] = ml::standardize_fit_transform(ml::feature_matrix(a.cells));
    a.standardizer = std::move(standardizer);
    a.pca = ml::pca_fit(z);
    a.principal = ml::pca_transform(a.pca, z);
  });
  stage("kmeans", [&] {
    a.kmeans = ml::kmeans_fit(a.principal, options.kmeans);
    a.labeling = ml::label_clusters(a.kmeans, a.cells, options.labels);
  });
  stage("evaluate", [&] {
    if (truth) a.confusion = eval::confusion(a.labeling.status, *truth, a.grid);
    a.les = eval::les_statistics(a.cells, a.labeling.status);
  });
  return a;
}

RunResult run(const PipelineConfig& config) {
  const auto& dir = config.output_dir;
  stage("output", [&] {
    std::filesystem::create_directories(dir);
    remove_artifacts(dir);
  });
  try {
    const auto frame = stage("load", [&] { return io::read_frame(config.frame_path); });
    const auto truth = stage("load", [&]() -> std::optional<DefectMap> {
      if (!config.defects_path) return std::nullopt;
      return io::read_defect_map(*config.defects_path);
    });
    RunResult out;
    out.analysis = analyze(frame, truth, config.analysis);
    stage("write", [&] {
      out.report_json = report::render_json(out.analysis);
      io::write_text(dir / kProjectionsXFile, report::projection_csv(out.analysis.projections.x));
      io::write_text(dir / kProjectionsYFile, report::projection_csv(out.analysis.projections.y));
      io::write_text(dir / kFeaturesFile, report::features_csv(out.analysis.cells));
      io::write_text(dir / kOverlayFile, report::overlay_svg(out.analysis));
      io::write_text(dir / kReportFile, out.report_json);
    });
    return out;
  } catch (...) {
    remove_artifacts(dir);
    throw;
  }
}

std::string summary_line(const Analysis& a) {
  char buf[256];
  std::string s;
  std::snprintf(buf, sizeof buf, "cell_size=%.3fx%.3f px", a.metrics.mean_cell_width, a.metrics.mean_cell_height);
  s += buf;
  if (a.confusion) {
    std::snprintf(buf, sizeof buf, " accuracy=%.4f fnr=%.4f fpr=%.4f", a.confusion->accuracy,
                  a.confusion->false_negative_rate, a.confusion->false_positive_rate);
    s += buf;
  }
  std::snprintf(buf, sizeof buf, " defects=%zu/%zu raw_mean=%.6g denoised_mean=%.6g",
                a.les.raw_count - a.les.denoised_count, a.les.raw_count, a.les.raw_mean, a.les.denoised_mean);
  s += buf;
  return s;
}

}  // namespace uled::pipeline
