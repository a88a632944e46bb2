#include "reflectionless/error.hpp"

namespace refl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveCoefficient: return "NonPositiveCoefficient";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BandEdge: return "BandEdge";
    case ErrorCode::SpectralGap: return "SpectralGap";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::BranchFailure: return "BranchFailure";
    case ErrorCode::CrossCheckFailure: return "CrossCheckFailure";
    case ErrorCode::NoOpenChannel: return "NoOpenChannel";
    case ErrorCode::NormalizationPole: return "NormalizationPole";
    case ErrorCode::DegenerateBasis: return "DegenerateBasis";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::SolverFailure: return "SolverFailure";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveCoefficient:
    case ErrorCode::NonFiniteEntry:
    case ErrorCode::WindowTooSmall:
    case ErrorCode::SchemaError:
    case ErrorCode::InvalidArgument:
      return true;
    default:
      return false;
  }
}

namespace {
std::string decorate(ErrorCode code, const std::string& what, std::optional<long> site) {
  std::string out(to_string(code));
  if (site) out += " at k=" + std::to_string(*site);
  if (!what.empty()) out += ": " + what;
  return out;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& what, std::optional<long> site)
    : std::runtime_error(decorate(code, what, site)), code_(code), site_(site) {}

}  // namespace refl
