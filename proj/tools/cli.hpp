#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lakelet::cli {

// Runs one `lakelet` invocation. Returns 0 on success, 1 on a domain error
// (reported on `err`), 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lakelet::cli
