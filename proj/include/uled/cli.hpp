#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uled::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitStage = 3;
inline constexpr int kExitMismatch = 4;

inline constexpr const char* kVersion = "0.1.0";

/// Entry point behind the uled_inspect binary. `args` excludes the program
/// name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uled::cli
