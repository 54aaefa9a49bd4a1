#pragma once

#include <string>
#include <vector>

#include "core/harness.hpp"

namespace ob {

// Named reproduction presets shipped with the repository. Each is a complete
// config in the same schema parse_config accepts; preset_config parses it and
// sets the output stem to the preset name.
std::vector<std::string> preset_names();
const char* preset_ini(const std::string& name);  // nullptr if unknown
ExperimentConfig preset_config(const std::string& name);

}  // namespace ob
