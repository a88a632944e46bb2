#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "reflectionless/jacobi_spec.hpp"

namespace refl {

/// Parses a JSON operator document:
///
///   {"background":   {"kind": "free" | "constant" | "periodic",
///                     "a": number | [numbers], "b": number | [numbers],
///                     "phase": integer},
///    "perturbation": {"offset": integer, "a": [numbers], "b": [numbers]}}
///
/// Unknown keys are rejected. Schema violations throw Error{SchemaError} with
/// the offending field path; coefficient violations surface from validate().
JacobiSpec parse_config(std::string_view text);

JacobiSpec load_config(const std::filesystem::path& path);

/// Canonical JSON form; parse_config(serialize_config(s)) == s.
std::string serialize_config(const JacobiSpec& spec);

}  // namespace refl
