#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pccloud/error.hpp"

namespace pccloud::cli {

/// 0 ok, 1 validation/usage, 2 I/O, 3 network/provider.
int exitCodeFor(ErrorKind kind);

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pccloud::cli
