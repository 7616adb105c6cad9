#pragma once

#include <string_view>

namespace lakelet {

// Resource globs: `*` matches within one `/`-separated segment, `**` matches
// across segments. Everything else is literal.
bool is_valid_glob(std::string_view pattern);
bool glob_match(std::string_view pattern, std::string_view resource);

}  // namespace lakelet
