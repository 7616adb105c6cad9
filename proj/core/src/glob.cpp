#include "lakelet/glob.hpp"

#include <vector>

namespace lakelet {

bool is_valid_glob(std::string_view pattern) {
  if (pattern.empty()) return false;
  int run = 0;
  for (char c : pattern) {
    if (c == '\t' || c == '\n' || c == '\r') return false;
    run = (c == '*') ? run + 1 : 0;
    if (run > 2) return false;
  }
  return true;
}

bool glob_match(std::string_view pattern, std::string_view resource) {
  // reachable[j]: the pattern prefix consumed so far can match resource[0, j).
  const std::size_t n = resource.size();
  std::vector<char> reachable(n + 1, 0), next(n + 1, 0);
  reachable[0] = 1;
  std::size_t i = 0;
  while (i < pattern.size()) {
    std::fill(next.begin(), next.end(), 0);
    if (pattern[i] == '*') {
      const bool deep = i + 1 < pattern.size() && pattern[i + 1] == '*';
      bool carry = false;
      for (std::size_t j = 0; j <= n; ++j) {
        if (reachable[j]) carry = true;
        if (carry) next[j] = 1;
        if (j < n && !deep && resource[j] == '/') carry = false;
      }
      i += deep ? 2 : 1;
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        if (reachable[j] && resource[j] == pattern[i]) next[j + 1] = 1;
      }
      ++i;
    }
    reachable.swap(next);
  }
  return reachable[n] != 0;
}

}  // namespace lakelet
