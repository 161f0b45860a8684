// Command-line entry point, separated from main() so tests can drive it
// in-process.  Returns 0 on success, 1 on input errors, 2 when a statistic
// could not be formed.
#pragma once

#include <string>
#include <vector>

namespace trendratio {

int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);  // without program name

}  // namespace trendratio
