#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace amln {

enum class Errc {
  InvalidArgument,
  DimensionMismatch,
  NumericalOverflow,
  InfeasibleCoverage,
  RankDeficient,
  LineSearchFailed,
  SingularHessian,
  SingularReducedHessian,
  DivisionUnderflow,
  ParseError,
  LabelDomainError,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

// Single exception type for the library. `location` is a sample index for
// NumericalOverflow, a 1-based line number for ParseError, and -1 otherwise.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::int64_t location = -1);

  Errc code() const noexcept { return code_; }
  std::int64_t location() const noexcept { return location_; }

 private:
  Errc code_;
  std::int64_t location_;
};

}  // namespace amln
