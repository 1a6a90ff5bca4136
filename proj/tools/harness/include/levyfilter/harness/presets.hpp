#pragma once

#include <string>
#include <vector>

#include "levyfilter/harness/config.hpp"

namespace levyfilter::harness {

std::vector<std::string> preset_names();

/// Built-in scenario; ConfigError naming `--preset` for an unknown name.
ScenarioConfig preset(const std::string& name);

}  // namespace levyfilter::harness
