#pragma once

#include <string>
#include <vector>

namespace metagramme {

// Runs the command-line interface. Results go to stdout as JSON lines,
// diagnostics to stderr. Returns 0 on success, 1 on processing errors,
// 2 on usage errors.
int run_cli(const std::vector<std::string>& args);

} // namespace metagramme
