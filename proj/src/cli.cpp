#include "uled/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>

#include "uled/config.hpp"
#include "uled/error.hpp"
#include "uled/io.hpp"
#include "uled/pipeline.hpp"
#include "uled/synthgen.hpp"

namespace uled::cli {
namespace {

using json = nlohmann::ordered_json;

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::io:
      return kExitIo;
    case ErrorKind::config:
      return kExitUsage;
    default:
      return kExitStage;
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& frame) {
  auto p = frame;
  p += ".corners.json";
  return p;
}

struct GenerateArgs {
  std::string config, out_frame, out_defects;
  std::optional<std::uint64_t> seed;
};

int do_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  synth::SynthConfig cfg;
  try {
    cfg = config::parse_synth_config(io::read_text(a.config));
    if (a.seed) cfg.seed = *a.seed;
  } catch (const Error& e) {
    err << "error: " << a.config << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
  try {
    const auto result = synth::generate(cfg);
    io::write_frame(result.frame, a.out_frame);
    io::write_defect_map(result.defects, a.out_defects);
    json corners = json::array();
    for (const auto& p : result.corner_points) corners.push_back(json::array({p.x, p.y}));
    json side = {{"corners", corners},
                 {"functional_mean", result.functional_mean},
                 {"defect_count", result.defects.defect_count()},
                 {"seed", cfg.seed}};
    io::write_text(sidecar_path(a.out_frame), side.dump(2) + "\n");
    out << "wrote " << a.out_frame << " (" << cfg.frame_width << "x" << cfg.frame_height << ", "
        << result.defects.defect_count() << " defects)\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

struct AnalyzeArgs {
  std::string frame, defects, corners, out;
  bool auto_corners = false;
  bool no_rectify = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_init;
  std::optional<double> threshold;
};

geometry::Quad parse_corners(const std::string& text) {
  std::vector<double> v;
  std::string_view s = text;
  while (!s.empty()) {
    const auto comma = s.find(',');
    auto item = s.substr(0, comma);
    s = comma == std::string_view::npos ? std::string_view{} : s.substr(comma + 1);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    double d = 0;
    const auto r = std::from_chars(item.data(), item.data() + item.size(), d);
    if (item.empty() || r.ec != std::errc() || r.ptr != item.data() + item.size() || !std::isfinite(d))
      throw Error(ErrorKind::config, "--corners: invalid number '" + std::string(item) + "'");
    v.push_back(d);
  }
  if (v.size() != 8) throw Error(ErrorKind::config, "--corners expects 8 numbers x1,y1,...,x4,y4");
  return {{{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]}}};
}

int do_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  pipeline::PipelineConfig cfg;
  try {
    cfg.frame_path = a.frame;
    if (!a.defects.empty()) cfg.defects_path = a.defects;
    cfg.output_dir = a.out;
    auto& opt = cfg.analysis;
    if (!a.corners.empty()) {
      opt.corner_mode = pipeline::CornerMode::explicit_points;
      opt.corners = parse_corners(a.corners);
    } else if (a.no_rectify) {
      opt.corner_mode = pipeline::CornerMode::none;
    }
    if (a.seed) opt.kmeans.seed = *a.seed;
    if (a.n_init) opt.kmeans.n_init = *a.n_init;
    if (a.threshold) opt.rel_threshold = *a.threshold;
    opt.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const auto result = pipeline::run(cfg);
    out << pipeline::summary_line(result.analysis) << "\n";
    return kExitOk;
  } catch (const pipeline::StageError& e) {
    err << "error: stage " << e.what() << "\n";
    return e.kind() == ErrorKind::io ? kExitIo : kExitStage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

struct Comparison {
  std::vector<std::string> diffs;

  void number(const std::string& path, const json& a, const json& b, double abs_tol, double rel_tol) {
    if (a.is_null() && b.is_null()) return;
    if (!a.is_number() || !b.is_number()) {
      if (a != b) diffs.push_back(path + ": " + a.dump() + " vs " + b.dump());
      return;
    }
    const double x = a.get<double>(), y = b.get<double>();
    const double tol = std::max(abs_tol, rel_tol * std::max(std::abs(x), std::abs(y)));
    if (!(std::abs(x - y) <= tol)) diffs.push_back(path + ": " + a.dump() + " vs " + b.dump());
  }

  void exact(const std::string& path, const json& a, const json& b) {
    if (a != b) diffs.push_back(path + ": " + a.dump() + " vs " + b.dump());
  }
};

json section(const json& doc, const char* key) {
  if (!doc.is_object()) throw Error(ErrorKind::format, "report is not a JSON object");
  const auto it = doc.find(key);
  return it == doc.end() ? json() : *it;
}

json member(const json& s, const std::string& key) {
  if (!s.is_object()) return json();
  const auto it = s.find(key);
  return it == s.end() ? json() : *it;
}

int do_evaluate(const std::vector<std::string>& reports, std::ostream& out, std::ostream& err) {
  json docs[2];
  for (int i = 0; i < 2; ++i) {
    try {
      docs[i] = json::parse(io::read_text(reports[i]));
      if (!docs[i].is_object()) throw Error(ErrorKind::format, "not a JSON object");
    } catch (const std::exception& e) {
      err << "error: cannot read report " << reports[i] << ": " << e.what() << "\n";
      return kExitUsage;
    }
  }
  if (docs[0] == docs[1]) {
    out << "identical\n";
    return kExitOk;
  }
  Comparison c;
  const auto& [a, b] = docs;
  for (const char* k : {"mean_cell_width", "mean_cell_height", "std_cell_width", "std_cell_height",
                        "mean_pitch_x", "mean_pitch_y"})
    c.number(std::string("grid_metrics.") + k, member(section(a, "grid_metrics"), k),
             member(section(b, "grid_metrics"), k), 1e-6, 0.0);
  const auto ca = section(a, "confusion"), cb = section(b, "confusion");
  if (ca.is_null() != cb.is_null()) {
    c.diffs.push_back("confusion: " + std::string(ca.is_null() ? "absent" : "present") + " vs " +
                      (cb.is_null() ? "absent" : "present"));
  } else if (!ca.is_null()) {
    for (const char* k : {"true_functional_pred_functional", "true_functional_pred_defect",
                          "true_defect_pred_functional", "true_defect_pred_defect"})
      c.exact(std::string("confusion.") + k, member(ca, k), member(cb, k));
    for (const char* k : {"accuracy", "false_negative_rate", "false_positive_rate"})
      c.number(std::string("confusion.") + k, member(ca, k), member(cb, k), 1e-9, 0.0);
  }
  const auto la = section(a, "les_stats"), lb = section(b, "les_stats");
  for (const char* k : {"raw_count", "denoised_count"})
    c.exact(std::string("les_stats.") + k, member(la, k), member(lb, k));
  for (const char* k : {"raw_mean", "raw_sem", "denoised_mean", "denoised_sem"})
    c.number(std::string("les_stats.") + k, member(la, k), member(lb, k), 0.0, 1e-9);

  if (c.diffs.empty()) {
    out << "equal within tolerance\n";
    return kExitOk;
  }
  for (const auto& d : c.diffs) out << d << "\n";
  return kExitMismatch;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("µLED array inspection: synthetic captures, grid reconstruction and defect classification",
               "uled_inspect");
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Render a synthetic capture with ground truth");
  generate->add_option("--config", gen.config, "key = value synthesis config")->required();
  generate->add_option("--out-frame", gen.out_frame, "Output ULF1 frame")->required();
  generate->add_option("--out-defects", gen.out_defects, "Output defect map CSV")->required();
  generate->add_option("--seed", gen.seed, "Override the config seed");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Reconstruct the grid and classify every cell");
  analyze->add_option("--frame", an.frame, "Input ULF1 frame")->required();
  analyze->add_option("--defects", an.defects, "Ground-truth defect map CSV");
  auto* corners = analyze->add_option("--corners", an.corners, "Emitting-area corners x1,y1,...,x4,y4 (TL TR BR BL)");
  auto* autoc = analyze->add_flag("--auto-corners", an.auto_corners, "Detect the corners (default)");
  auto* none = analyze->add_flag("--no-rectify", an.no_rectify, "Analyse the frame without rectification");
  corners->excludes(autoc)->excludes(none);
  autoc->excludes(none);
  analyze->add_option("--out", an.out, "Output directory")->required();
  analyze->add_option("--seed", an.seed, "k-means seed (default 8)");
  analyze->add_option("--n-init", an.n_init, "k-means restarts (default 100)")->check(CLI::PositiveNumber);
  analyze->add_option("--threshold", an.threshold, "Relative corner-detection threshold (default 0.3)");

  std::vector<std::string> reports;
  auto* evaluate = app.add_subcommand("evaluate", "Compare two reports");
  evaluate->add_option("--report", reports, "Report JSON (give twice)")->required()->expected(1)->multi_option_policy(
      CLI::MultiOptionPolicy::TakeAll);

  auto* version = app.add_subcommand("version", "Print the version");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (evaluate->parsed() && reports.size() != 2)
      throw CLI::ValidationError("--report", "expected exactly two reports, got " + std::to_string(reports.size()));
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  if (version->parsed()) {
    out << "uled_inspect " << kVersion << "\n";
    return kExitOk;
  }
  if (generate->parsed()) return do_generate(gen, out, err);
  if (analyze->parsed()) return do_analyze(an, out, err);
  return do_evaluate(reports, out, err);
}

}  // namespace uled::cli
