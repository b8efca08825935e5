#include "uled/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace uled::report {
namespace {

using json = nlohmann::ordered_json;

std::string number(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

const char* status_name(ml::CellStatus s) { return s == ml::CellStatus::defect ? "defect" : "functional"; }

json point(const geometry::Point& p) { return json::array({p.x, p.y}); }

}  // namespace

std::string render_json(const pipeline::Analysis& a) {
  json doc;
  doc["frame"] = {{"width", a.frame_width}, {"height", a.frame_height}};
  if (a.corners) {
    json corners = json::array();
    for (const auto& p : *a.corners) corners.push_back(point(p));
    doc["corners"] = corners;
    doc["rectification"] = a.rectification.matrix();
  } else {
    doc["corners"] = nullptr;
    doc["rectification"] = nullptr;
  }
  const auto& m = a.metrics;
  doc["grid"] = {{"rows", a.grid.rows()},
                 {"cols", a.grid.cols()},
                 {"interior_cells", a.grid.interior_count()},
                 {"x_edges", a.grid.x_edges()},
                 {"y_edges", a.grid.y_edges()}};
  doc["grid_metrics"] = {{"mean_cell_width", m.mean_cell_width},   {"mean_cell_height", m.mean_cell_height},
                         {"std_cell_width", m.std_cell_width},     {"std_cell_height", m.std_cell_height},
                         {"mean_pitch_x", m.mean_pitch_x},         {"mean_pitch_y", m.mean_pitch_y}};
  doc["standardizer"] = {{"mean", a.standardizer.mean}, {"scale", a.standardizer.scale}};
  doc["pca"] = {{"components", json::array({a.pca.components.row(0), a.pca.components.row(1)})},
                {"explained_variance", a.pca.explained_variance}};
  json centroids = json::array();
  for (std::size_t c = 0; c < a.kmeans.centroids.rows(); ++c) centroids.push_back(a.kmeans.centroids.row(c));
  doc["kmeans"] = {{"k", a.kmeans.config.k},
                   {"n_init", a.kmeans.config.n_init},
                   {"seed", a.kmeans.config.seed},
                   {"max_iter", a.kmeans.config.max_iter},
                   {"tol", a.kmeans.config.tol},
                   {"centroids", centroids},
                   {"inertia", a.kmeans.inertia},
                   {"best_restart", a.kmeans.best_restart},
                   {"functional_cluster", a.labeling.functional_cluster},
                   {"max_defect_ratio", a.labels.max_defect_ratio}};
  if (a.confusion) {
    const auto& c = *a.confusion;
    doc["confusion"] = {{"true_functional_pred_functional", c.true_functional_pred_functional},
                        {"true_functional_pred_defect", c.true_functional_pred_defect},
                        {"true_defect_pred_functional", c.true_defect_pred_functional},
                        {"true_defect_pred_defect", c.true_defect_pred_defect},
                        {"accuracy", c.accuracy},
                        {"false_negative_rate", c.false_negative_rate},
                        {"false_positive_rate", c.false_positive_rate}};
  } else {
    doc["confusion"] = nullptr;
  }
  doc["les_stats"] = {{"raw_mean", a.les.raw_mean},           {"raw_sem", a.les.raw_sem},
                      {"raw_count", a.les.raw_count},         {"denoised_mean", a.les.denoised_mean},
                      {"denoised_sem", a.les.denoised_sem},   {"denoised_count", a.les.denoised_count}};
  doc["flags"] = {{"degenerate_clustering", a.labeling.degenerate},
                  {"truth_available", a.truth.has_value()},
                  {"fnr_undefined", a.confusion && a.confusion->fnr_undefined},
                  {"fpr_undefined", a.confusion && a.confusion->fpr_undefined}};
  json cells = json::array();
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    const auto& f = a.cells[i];
    json c = {{"row", f.row},         {"col", f.col},       {"mean_l", f.mean_l},
              {"max_l", f.max_l},     {"min_l", f.min_l},   {"std_l", f.std_l},
              {"mean_cx", f.mean_cx}, {"mean_cy", f.mean_cy}, {"pc1", a.principal(i, 0)},
              {"pc2", a.principal(i, 1)}, {"cluster", a.kmeans.labels[i]},
              {"predicted", status_name(a.labeling.status[i])}};
    if (a.truth) c["truth"] = a.truth->is_defective(f.row, f.col) ? "defect" : "functional";
    cells.push_back(std::move(c));
  }
  doc["per_cell"] = std::move(cells);
  return doc.dump(2) + "\n";
}

std::string projection_csv(const grid::AxisProjection& projection) {
  std::string out = "coordinate,value\n";
  for (std::size_t i = 0; i < projection.values.size(); ++i)
    out += number(static_cast<double>(i) + 0.5) + "," + number(projection.values[i]) + "\n";
  return out;
}

std::string features_csv(std::span<const features::CellFeatures> cells) {
  std::string out = "row,col,mean_l,max_l,min_l,std_l,mean_cx,mean_cy\n";
  for (const auto& f : cells) {
    out += std::to_string(f.row) + "," + std::to_string(f.col);
    for (double v : f.values()) out += "," + number(v);
    out += "\n";
  }
  return out;
}

std::string overlay_svg(const pipeline::Analysis& a) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << a.rectified.width << "\" height=\""
    << a.rectified.height << "\" viewBox=\"0 0 " << a.rectified.width << " " << a.rectified.height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"#000\"/>\n";

  double peak = 0.0;
  for (const auto& f : a.cells) peak = std::max(peak, f.mean_l);
  const auto& xe = a.grid.x_edges();
  const auto& ye = a.grid.y_edges();
  s << "<g id=\"heatmap\">\n";
  for (const auto& f : a.cells) {
    const int level = peak > 0 ? static_cast<int>(std::clamp(f.mean_l / peak, 0.0, 1.0) * 255.0 + 0.5) : 0;
    char color[8];
    std::snprintf(color, sizeof color, "#%02x%02x%02x", level, level, level);
    s << "<rect x=\"" << number(xe[f.col]) << "\" y=\"" << number(ye[f.row]) << "\" width=\""
      << number(xe[f.col + 1] - xe[f.col]) << "\" height=\"" << number(ye[f.row + 1] - ye[f.row])
      << "\" fill=\"" << color << "\"/>\n";
  }
  s << "</g>\n<g id=\"grid\" stroke=\"#3060ff\" stroke-width=\"0.5\">\n";
  for (double x : xe)
    s << "<line x1=\"" << number(x) << "\" y1=\"" << number(ye.front()) << "\" x2=\"" << number(x) << "\" y2=\""
      << number(ye.back()) << "\"/>\n";
  for (double y : ye)
    s << "<line x1=\"" << number(xe.front()) << "\" y1=\"" << number(y) << "\" x2=\"" << number(xe.back())
      << "\" y2=\"" << number(y) << "\"/>\n";
  s << "</g>\n<g id=\"defects\" fill=\"none\" stroke=\"#ff3030\" stroke-width=\"1.5\">\n";
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    if (a.labeling.status[i] != ml::CellStatus::defect) continue;
    const auto& f = a.cells[i];
    s << "<rect x=\"" << number(xe[f.col]) << "\" y=\"" << number(ye[f.row]) << "\" width=\""
      << number(xe[f.col + 1] - xe[f.col]) << "\" height=\"" << number(ye[f.row + 1] - ye[f.row]) << "\"/>\n";
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

}  // namespace uled::report
