#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uled/error.hpp"
#include "uled/eval.hpp"
#include "uled/features.hpp"
#include "uled/frame.hpp"
#include "uled/geometry.hpp"
#include "uled/grid.hpp"
#include "uled/ml.hpp"

namespace uled::pipeline {

enum class CornerMode {
  automatic,  // detect_corners on the input frame
  explicit_points,
  none,  // analyse the frame as captured
};

struct AnalysisOptions {
  CornerMode corner_mode = CornerMode::automatic;
  geometry::Quad corners{};  // used with CornerMode::explicit_points
  double rel_threshold = 0.3;
  grid::GridOptions grid;
  ml::KMeansConfig kmeans;
  ml::LabelOptions labels;

  /// Throws ErrorKind::config on an invalid field.
  void validate() const;
};

struct PipelineConfig {
  AnalysisOptions analysis;
  std::filesystem::path frame_path;
  std::optional<std::filesystem::path> defects_path;
  std::filesystem::path output_dir;
};

/// Every intermediate of one analysis, in stage order.
struct Analysis {
  std::uint32_t frame_width = 0;
  std::uint32_t frame_height = 0;
  std::optional<geometry::Quad> corners;  // absent for CornerMode::none
  geometry::Homography rectification;
  MeasurementFrame rectified;
  grid::Projections projections;
  grid::PixelGrid grid;
  grid::GridMetrics metrics;
  std::vector<features::CellFeatures> cells;
  ml::Standardizer standardizer;
  ml::PcaModel pca;
  ml::Matrix principal;  // cells x 2
  ml::KMeansModel kmeans;
  ml::LabelOptions labels;
  ml::Labeling labeling;
  std::optional<DefectMap> truth;
  std::optional<eval::ConfusionMatrix> confusion;
  eval::LesStats les;
};

/// A failure inside one pipeline stage. kind() is the cause's kind.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), stage + ": " + cause.what()), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// rectify -> project -> grid -> features -> standardize -> pca -> kmeans ->
/// label -> evaluate. The confusion matrix is skipped without `truth`.
Analysis analyze(const MeasurementFrame& frame, const std::optional<DefectMap>& truth,
                 const AnalysisOptions& options = {});

/// File names written into the output directory.
inline constexpr std::string_view kReportFile = "report.json";
inline constexpr std::string_view kProjectionsXFile = "projections_x.csv";
inline constexpr std::string_view kProjectionsYFile = "projections_y.csv";
inline constexpr std::string_view kFeaturesFile = "features.csv";
inline constexpr std::string_view kOverlayFile = "overlay.svg";

struct RunResult {
  Analysis analysis;
  std::string report_json;
};

/// Loads the inputs, runs analyze() and writes every artifact. Stale artifacts
/// are removed before the run and partial ones after a failure. Throws
/// StageError.
RunResult run(const PipelineConfig& config);

/// One-line summary: cell size, accuracy when truth is known, LES means.
std::string summary_line(const Analysis& analysis);

}  // namespace uled::pipeline
