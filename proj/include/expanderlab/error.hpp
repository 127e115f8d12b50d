#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace expanderlab {

enum class ErrorKind {
  invalid_parameter,
  non_convergence,
  blow_up,
  step_underflow,
  bracket_failure,
  tolerance_not_met,
  trace_mismatch,
  cfl_underflow,
  slope_cap_exceeded,
  past_extinction,
  quadrature_tolerance,
  search_radius_overflow,
  hypothesis_violation,
  window_escapes_grid,
  unknown_kind,
  io,
  usage,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind so
/// sweeps can record it per row and the CLI can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace expanderlab
