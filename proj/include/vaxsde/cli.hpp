#pragma once

#include <iosfwd>
#include <string>

namespace vaxsde {

/// Entry point of the `vaxsde` tool. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Resolves a scenario argument: an existing file, or the name of a bundled scenario.
std::string resolve_scenario_path(const std::string& arg);

}  // namespace vaxsde
