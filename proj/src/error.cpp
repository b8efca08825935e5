#include "uled/error.hpp"

namespace uled {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::format: return "format";
    case ErrorKind::length: return "length";
    case ErrorKind::validation: return "validation";
    case ErrorKind::range: return "range";
    case ErrorKind::io: return "io";
    case ErrorKind::config: return "config";
    case ErrorKind::singular: return "singular";
    case ErrorKind::horizon: return "horizon";
    case ErrorKind::detection: return "detection";
    case ErrorKind::periodicity: return "periodicity";
    case ErrorKind::grid: return "grid";
    case ErrorKind::metrics: return "metrics";
    case ErrorKind::extraction: return "extraction";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::input: return "input";
  }
  return "unknown";
}

}  // namespace uled
