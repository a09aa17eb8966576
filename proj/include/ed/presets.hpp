#pragma once

#include <string>
#include <vector>

namespace ed {

// Bundled experiment presets, in figure order. Each name maps to a config
// text that parses with zero diagnostics and is seed-deterministic.
std::vector<std::string> preset_names();

// Config text for one preset; empty string when the name is unknown.
std::string preset_config(const std::string& name);

}  // namespace ed
