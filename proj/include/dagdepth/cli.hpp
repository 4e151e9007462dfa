#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dagdepth {

// Runs one CLI invocation (argv without the program name) against the given
// streams. Returns the process exit code: 0 success, 1 domain or usage
// errors, 2 budget or capacity errors, 3 underpowered statistics.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dagdepth
