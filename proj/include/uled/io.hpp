#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uled/frame.hpp"

namespace uled::io {

// ULF1 layout: "ULF1", u32 width, u32 height, u8 channels (1 or 3), then
// planar row-major float32 samples (luminance, chroma_x, chroma_y). All
// integers and floats little-endian.
inline constexpr char kFrameMagic[4] = {'U', 'L', 'F', '1'};
inline constexpr std::size_t kFrameHeaderSize = 13;

std::vector<std::byte> encode_frame(const MeasurementFrame& frame);
MeasurementFrame decode_frame(std::span<const std::byte> bytes);

MeasurementFrame read_frame(const std::filesystem::path& path);
void write_frame(const MeasurementFrame& frame, const std::filesystem::path& path);

// Defect-map CSV: first line "rows,cols" with the array dimensions, then one
// "row,col" line per defective cell in row-major order. Blank lines and lines
// starting with '#' are ignored on read.
DefectMap parse_defect_map(std::string_view text);
std::string format_defect_map(const DefectMap& map);

DefectMap read_defect_map(const std::filesystem::path& path);
void write_defect_map(const DefectMap& map, const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace uled::io
