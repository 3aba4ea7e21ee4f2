/// @file config.hpp
/// @brief Text configuration: `key = value` lines grouped in [section]s.
///
/// Sections: domain, params, velocity, step, initial, truncation, monitors,
/// output, galerkin, verify. `#` and `;` start comments. Unknown sections
/// and keys are errors.
#pragma once

#include <string>
#include <string_view>

#include "discharge/run_config.hpp"

namespace discharge {

/// Parses and validates. Errors are ValidationError messages that start
/// with "line N:" whenever the offending line is known.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& config);

const char* to_string(Scheme s);
const char* to_string(SourceTreatment s);
const char* to_string(DensityBoundary b);
const char* to_string(MmsKind k);

}  // namespace discharge
