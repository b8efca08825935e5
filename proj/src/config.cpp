#include "uled/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <set>

#include "uled/error.hpp"

namespace uled::config {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::config, "line " + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, std::string_view key) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (text.empty() || r.ec != std::errc() || r.ptr != end)
    fail(line, "invalid value '" + std::string(text) + "' for " + std::string(key));
  return v;
}

std::vector<CellIndex> parse_cells(std::string_view text, std::size_t line) {
  std::vector<CellIndex> cells;
  while (!text.empty()) {
    const auto semi = text.find(';');
    const auto item = trim(text.substr(0, semi));
    text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
    if (item.empty()) continue;
    const auto comma = item.find(',');
    if (comma == std::string_view::npos) fail(line, "defect entry '" + std::string(item) + "' is not row,col");
    cells.push_back({parse_number<std::size_t>(trim(item.substr(0, comma)), line, "defects"),
                     parse_number<std::size_t>(trim(item.substr(comma + 1)), line, "defects")});
  }
  return cells;
}

using Setter = std::function<void(synth::SynthConfig&, std::string_view, std::size_t)>;

template <typename T>
Setter field(T synth::SynthConfig::*member, const char* key) {
  return [member, key](synth::SynthConfig& c, std::string_view v, std::size_t line) {
    c.*member = parse_number<T>(v, line, key);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  using C = synth::SynthConfig;
  static const std::map<std::string, Setter, std::less<>> table = {
      {"frame_width", field(&C::frame_width, "frame_width")},
      {"frame_height", field(&C::frame_height, "frame_height")},
      {"grid_rows", field(&C::grid_rows, "grid_rows")},
      {"grid_cols", field(&C::grid_cols, "grid_cols")},
      {"cell_size_px", field(&C::cell_size_px, "cell_size_px")},
      {"gap_px", field(&C::gap_px, "gap_px")},
      {"lum_mean", field(&C::lum_mean, "lum_mean")},
      {"lum_sigma", field(&C::lum_sigma, "lum_sigma")},
      {"defect_fraction", field(&C::defect_fraction, "defect_fraction")},
      {"defect_residual", field(&C::defect_residual, "defect_residual")},
      {"rotation_deg", field(&C::rotation_deg, "rotation_deg")},
      {"perspective_strength", field(&C::perspective_strength, "perspective_strength")},
      {"noise_sigma", field(&C::noise_sigma, "noise_sigma")},
      {"chroma_mean_x", field(&C::chroma_mean_x, "chroma_mean_x")},
      {"chroma_mean_y", field(&C::chroma_mean_y, "chroma_mean_y")},
      {"chroma_sigma", field(&C::chroma_sigma, "chroma_sigma")},
      {"seed", field(&C::seed, "seed")},
      {"defects", [](C& c, std::string_view v, std::size_t line) { c.defect_list = parse_cells(v, line); }},
  };
  return table;
}

std::string number(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

synth::SynthConfig parse_synth_config(std::string_view text) {
  synth::SynthConfig c;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) fail(line_no, "unknown key '" + std::string(key) + "'");
    if (!seen.emplace(key).second) fail(line_no, "repeated key '" + std::string(key) + "'");
    it->second(c, value, line_no);
  }
  c.validate();
  return c;
}

std::string format_synth_config(const synth::SynthConfig& c) {
  std::string s;
  auto put = [&](const char* key, const std::string& v) { s += std::string(key) + " = " + v + "\n"; };
  put("frame_width", std::to_string(c.frame_width));
  put("frame_height", std::to_string(c.frame_height));
  put("grid_rows", std::to_string(c.grid_rows));
  put("grid_cols", std::to_string(c.grid_cols));
  put("cell_size_px", number(c.cell_size_px));
  put("gap_px", number(c.gap_px));
  put("lum_mean", number(c.lum_mean));
  put("lum_sigma", number(c.lum_sigma));
  put("defect_fraction", number(c.defect_fraction));
  put("defect_residual", number(c.defect_residual));
  put("rotation_deg", number(c.rotation_deg));
  put("perspective_strength", number(c.perspective_strength));
  put("noise_sigma", number(c.noise_sigma));
  put("chroma_mean_x", number(c.chroma_mean_x));
  put("chroma_mean_y", number(c.chroma_mean_y));
  put("chroma_sigma", number(c.chroma_sigma));
  put("seed", std::to_string(c.seed));
  if (c.defect_list) {
    std::string cells;
    for (const auto& d : *c.defect_list) {
      if (!cells.empty()) cells += "; ";
      cells += std::to_string(d.row) + "," + std::to_string(d.col);
    }
    put("defects", cells);
  }
  return s;
}

}  // namespace uled::config
