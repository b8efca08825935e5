#include "uled/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "uled/error.hpp"

namespace uled {

MeasurementFrame MeasurementFrame::zeros(std::uint32_t width, std::uint32_t height,
                                         bool with_chroma) {
  MeasurementFrame f;
  f.width = width;
  f.height = height;
  f.luminance.assign(f.sample_count(), 0.0f);
  if (with_chroma) {
    f.chroma_x.assign(f.sample_count(), 0.0f);
    f.chroma_y.assign(f.sample_count(), 0.0f);
  }
  return f;
}

void MeasurementFrame::validate() const {
  if (width == 0 || height == 0)
    throw Error(ErrorKind::validation, "frame dimensions must be positive");
  const std::size_t n = sample_count();
  if (luminance.size() != n)
    throw Error(ErrorKind::validation, "luminance plane has " + std::to_string(luminance.size()) +
                                           " samples, expected " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    const float v = luminance[i];
    if (!std::isfinite(v) || v < 0.0f)
      throw Error(ErrorKind::validation,
                  "luminance sample at index " + std::to_string(i) + " is not finite and >= 0");
  }
  if (chroma_x.empty() != chroma_y.empty())
    throw Error(ErrorKind::validation, "chroma planes must be both present or both absent");
  if (chroma_x.empty()) return;
  if (chroma_x.size() != n || chroma_y.size() != n)
    throw Error(ErrorKind::validation, "chroma plane size mismatch");
  for (const auto* plane : {&chroma_x, &chroma_y}) {
    const char* name = plane == &chroma_x ? "chroma_x" : "chroma_y";
    for (std::size_t i = 0; i < n; ++i) {
      const float v = (*plane)[i];
      if (!(v >= 0.0f && v <= 1.0f))
        throw Error(ErrorKind::validation,
                    std::string(name) + " sample at index " + std::to_string(i) + " outside [0,1]");
    }
  }
}

DefectMap::DefectMap(std::size_t rows, std::size_t cols, std::span<const CellIndex> defects)
    : rows_(rows), cols_(cols), flags_(rows * cols, 0) {
  if (rows == 0 || cols == 0) throw Error(ErrorKind::range, "defect map dimensions must be positive");
  for (const auto& d : defects) {
    if (d.row >= rows || d.col >= cols)
      throw Error(ErrorKind::range, "defect (" + std::to_string(d.row) + "," +
                                        std::to_string(d.col) + ") outside " +
                                        std::to_string(rows) + "x" + std::to_string(cols) + " map");
    auto& flag = flags_[d.row * cols + d.col];
    if (flag)
      throw Error(ErrorKind::format, "duplicate defect (" + std::to_string(d.row) + "," +
                                         std::to_string(d.col) + ")");
    flag = 1;
    ++count_;
  }
}

std::vector<CellIndex> DefectMap::defects() const {
  std::vector<CellIndex> out;
  out.reserve(count_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (is_defective(r, c)) out.push_back({r, c});
  return out;
}

}  // namespace uled

namespace uled::io {
namespace {

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(std::span<const std::byte> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::to_integer<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}

void put_plane(std::vector<std::byte>& out, const std::vector<float>& plane) {
  for (float f : plane) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

std::vector<float> get_plane(std::span<const std::byte> b, std::size_t at, std::size_t n) {
  std::vector<float> plane(n);
  for (std::size_t i = 0; i < n; ++i) plane[i] = std::bit_cast<float>(get_u32(b, at + 4 * i));
  return plane;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::pair<long long, long long> parse_pair(std::string_view line, std::size_t line_no) {
  const auto comma = line.find(',');
  auto fail = [&] {
    return Error(ErrorKind::format,
                 "defect map line " + std::to_string(line_no) + ": expected 'a,b', got '" +
                     std::string(line) + "'");
  };
  if (comma == std::string_view::npos) throw fail();
  const auto a = trim(line.substr(0, comma));
  const auto b = trim(line.substr(comma + 1));
  long long va = 0, vb = 0;
  auto ra = std::from_chars(a.data(), a.data() + a.size(), va);
  auto rb = std::from_chars(b.data(), b.data() + b.size(), vb);
  if (ra.ec != std::errc{} || ra.ptr != a.data() + a.size() || rb.ec != std::errc{} ||
      rb.ptr != b.data() + b.size())
    throw fail();
  return {va, vb};
}

}  // namespace

std::vector<std::byte> encode_frame(const MeasurementFrame& frame) {
  frame.validate();
  std::vector<std::byte> out;
  out.reserve(kFrameHeaderSize + frame.sample_count() * 4 * frame.channel_count());
  for (char c : kFrameMagic) out.push_back(static_cast<std::byte>(c));
  put_u32(out, frame.width);
  put_u32(out, frame.height);
  out.push_back(static_cast<std::byte>(frame.channel_count()));
  put_plane(out, frame.luminance);
  if (frame.has_chroma()) {
    put_plane(out, frame.chroma_x);
    put_plane(out, frame.chroma_y);
  }
  return out;
}

MeasurementFrame decode_frame(std::span<const std::byte> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kFrameMagic, 4) != 0)
    throw Error(ErrorKind::format, "missing ULF1 magic");
  if (bytes.size() < kFrameHeaderSize)
    throw Error(ErrorKind::length, "truncated ULF1 header");
  MeasurementFrame f;
  f.width = get_u32(bytes, 4);
  f.height = get_u32(bytes, 8);
  const auto channels = std::to_integer<unsigned>(bytes[12]);
  if (f.width == 0 || f.height == 0) throw Error(ErrorKind::format, "ULF1 dimensions must be positive");
  if (channels != 1 && channels != 3)
    throw Error(ErrorKind::format, "ULF1 channel count must be 1 or 3, got " + std::to_string(channels));
  const std::size_t n = f.sample_count();
  const std::size_t expected = kFrameHeaderSize + n * 4 * channels;
  if (bytes.size() != expected)
    throw Error(ErrorKind::length, "ULF1 payload is " + std::to_string(bytes.size()) +
                                       " bytes, expected " + std::to_string(expected));
  f.luminance = get_plane(bytes, kFrameHeaderSize, n);
  if (channels == 3) {
    f.chroma_x = get_plane(bytes, kFrameHeaderSize + 4 * n, n);
    f.chroma_y = get_plane(bytes, kFrameHeaderSize + 8 * n, n);
  }
  f.validate();
  return f;
}

MeasurementFrame read_frame(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open frame " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::io, "failed reading " + path.string());
  return decode_frame(std::as_bytes(std::span<const char>(raw)));
}

void write_frame(const MeasurementFrame& frame, const std::filesystem::path& path) {
  const auto bytes = encode_frame(frame);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

DefectMap parse_defect_map(std::string_view text) {
  bool have_dims = false;
  long long rows = 0, cols = 0;
  std::vector<std::pair<long long, long long>> raw;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto pair = parse_pair(line, line_no);
    if (!have_dims) {
      std::tie(rows, cols) = pair;
      if (rows <= 0 || cols <= 0)
        throw Error(ErrorKind::range, "defect map dimensions must be positive");
      have_dims = true;
    } else {
      raw.push_back(pair);
    }
  }
  if (!have_dims) throw Error(ErrorKind::format, "defect map is missing its rows,cols header");
  std::vector<CellIndex> cells;
  cells.reserve(raw.size());
  for (const auto& [r, c] : raw) {
    if (r < 0 || c < 0 || r >= rows || c >= cols)
      throw Error(ErrorKind::range, "defect (" + std::to_string(r) + "," + std::to_string(c) +
                                        ") outside " + std::to_string(rows) + "x" +
                                        std::to_string(cols) + " map");
    cells.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c)});
  }
  return DefectMap(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), cells);
}

std::string format_defect_map(const DefectMap& map) {
  std::string out = std::to_string(map.rows()) + "," + std::to_string(map.cols()) + "\n";
  for (const auto& d : map.defects())
    out += std::to_string(d.row) + "," + std::to_string(d.col) + "\n";
  return out;
}

DefectMap read_defect_map(const std::filesystem::path& path) {
  return parse_defect_map(read_text(path));
}

void write_defect_map(const DefectMap& map, const std::filesystem::path& path) {
  write_text(path, format_defect_map(map));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot create " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

}  // namespace uled::io
