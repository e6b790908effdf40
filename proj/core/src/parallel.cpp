#include "stordual/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace stordual {

std::size_t worker_limit() {
  if (const char* env = std::getenv("STORAGE_SOLVER_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (...) {
      // fall through to the hardware default on unparsable values
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace stordual
