#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wpg::frontends {

// Runs the `wpg` command line; `args` excludes the program name.
// Exit codes: 0 success, 1 failure (including failed checks), 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wpg::frontends
