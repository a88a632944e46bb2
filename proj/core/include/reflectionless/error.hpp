#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace refl {

enum class ErrorCode {
  NonPositiveCoefficient,
  NonFiniteEntry,
  WindowTooSmall,
  SchemaError,
  InvalidArgument,
  BandEdge,
  SpectralGap,
  PoleHit,
  BranchFailure,
  CrossCheckFailure,
  NoOpenChannel,
  NormalizationPole,
  DegenerateBasis,
  HorizonExceeded,
  SolverFailure,
};

std::string_view to_string(ErrorCode code);

/// True for the codes raised by input validation (configs, coefficient
/// rules, flag values); everything else is a numerical failure.
bool is_input_error(ErrorCode code);

/// Single exception type for the library. `site()` carries the lattice index
/// when the failure is attached to one (e.g. a non-positive a_k).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::optional<long> site = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<long> site() const noexcept { return site_; }

 private:
  ErrorCode code_;
  std::optional<long> site_;
};

}  // namespace refl
