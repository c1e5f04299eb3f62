#include "stochmatch/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace stochmatch {

int resolve_workers(std::optional<int> requested) {
  if (requested && *requested >= 1) return *requested;
  if (const char* env = std::getenv("STOCHMATCH_WORKERS")) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), v);
    if (ec == std::errc() && v >= 1) return v;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace stochmatch
