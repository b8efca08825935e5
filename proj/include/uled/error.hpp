#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uled {

enum class ErrorKind {
  format,
  length,
  validation,
  range,
  io,
  config,
  singular,
  horizon,
  detection,
  periodicity,
  grid,
  metrics,
  extraction,
  dimension,
  convergence,
  input,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. The kind lets callers (and the CLI's
/// exit-code mapping) branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace uled
