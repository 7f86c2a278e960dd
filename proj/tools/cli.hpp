// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hnet::cli {

// Runs one command line (args excludes the program name). Results go to
// `out` unless an output path is given; diagnostics go to `err` as
// "error[<code>]: <message>". Returns 0 on success, 1 on a library error and
// 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hnet::cli
