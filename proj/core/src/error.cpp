#include "amlnewton/error.hpp"

namespace amln {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NumericalOverflow: return "NumericalOverflow";
    case Errc::InfeasibleCoverage: return "InfeasibleCoverage";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::LineSearchFailed: return "LineSearchFailed";
    case Errc::SingularHessian: return "SingularHessian";
    case Errc::SingularReducedHessian: return "SingularReducedHessian";
    case Errc::DivisionUnderflow: return "DivisionUnderflow";
    case Errc::ParseError: return "ParseError";
    case Errc::LabelDomainError: return "LabelDomainError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message, std::int64_t location)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      location_(location) {}

}  // namespace amln
