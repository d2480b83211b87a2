#include "levitodyn/ensemble.hpp"

#include <charconv>
#include <cstdlib>
#include <string>

#include "levitodyn/errors.hpp"

namespace levitodyn {

int resolve_threads(std::optional<int> requested) {
  if (requested) {
    if (*requested < 1) throw InvalidArgument("--threads must be at least 1");
    return *requested;
  }
  if (const char* env = std::getenv("LEVITODYN_THREADS"); env && *env) {
    const std::string text(env);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || v < 1) {
      throw InvalidArgument("LEVITODYN_THREADS must be a positive integer, got '" + text + "'");
    }
    return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace levitodyn
