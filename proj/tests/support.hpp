#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "uled/synthgen.hpp"

namespace testing_support {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("uled_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// 16 x 16 cells on the default 26 px pitch in a 480 x 460 frame.
inline uled::synth::SynthConfig small_config() {
  uled::synth::SynthConfig c;
  c.frame_width = 480;
  c.frame_height = 460;
  c.grid_rows = 16;
  c.grid_cols = 16;
  c.defect_fraction = 0.05;
  return c;
}

}  // namespace testing_support
