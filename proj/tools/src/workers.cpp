#include "mrad/cli/workers.hpp"

#include <charconv>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mrad::cli {

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MRAD_WORKERS"); env && *env) {
    const std::string text(env);
    unsigned value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || value == 0) {
      throw std::invalid_argument("MRAD_WORKERS must be a positive integer, got '" + text + "'");
    }
    return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace mrad::cli
