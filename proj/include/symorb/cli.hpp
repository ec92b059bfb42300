// cli.hpp — command-line entry point, callable in-process for tests.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace symorb {

// Exit codes: 0 success, 1 verification disagreement, 2 inadmissible point,
// 3 on-boundary point, 64 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace symorb
