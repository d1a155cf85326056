#pragma once

#include <string>
#include <vector>

namespace terracelab {

/// Built-in scenario configs reproducing the standard experiments end to end.
std::vector<std::string> scenario_names();
/// TOML text for a named scenario; throws on unknown names.
std::string scenario_toml(const std::string& name);
bool has_scenario(const std::string& name);

}  // namespace terracelab
