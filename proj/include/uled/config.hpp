#pragma once

#include <string>
#include <string_view>

#include "uled/synthgen.hpp"

namespace uled::config {

// One "key = value" per line; '#' starts a comment, blank lines are ignored.
// Keys are the SynthConfig field names. "defects" takes an explicit list of
// cells as "row,col; row,col; ...". Unknown or repeated keys and unparsable
// values throw ErrorKind::config naming the line.
synth::SynthConfig parse_synth_config(std::string_view text);

/// Inverse of parse_synth_config; every field is written.
std::string format_synth_config(const synth::SynthConfig& config);

}  // namespace uled::config
