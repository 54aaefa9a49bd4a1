#pragma once

#include <string>

#include "core/harness.hpp"

namespace ob {

// Parses the experiment schema: flat [section] headers over key = value
// lines, '#'/';' comments, lowercase snake_case keys, decimal numbers,
// comma-separated lists. Sections: [ensemble], [oracle], [algorithm],
// [sweep], [bound]. Every violation is collected before failing, so one
// round trip surfaces all problems: unknown keys name the key and section,
// invariant violations quote the invariant.
ExperimentConfig parse_config(const std::string& text);

// Canonical serialization: every section and key in fixed order.
// parse_config(echo_config(cfg)) reproduces cfg exactly.
std::string echo_config(const ExperimentConfig& cfg);

}  // namespace ob
