// SPDX-License-Identifier: MIT
#pragma once

#include <string>
#include <vector>

namespace dppmix::cli {

/// Entry point used by both the binary and the tests. Returns the process
/// exit code: 0 ok, 2 invalid input, 3 numeric failure, 4 resource limit,
/// 5 non-convergence.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace dppmix::cli
