#include "w2lab/common.hpp"

#include <cstdlib>
#include <string>

namespace w2lab {

std::size_t solver_budget() {
  constexpr std::size_t kDefault = 25'000'000;
  const char* env = std::getenv("W2LAB_BUDGET");
  if (env == nullptr || *env == '\0') return kDefault;
  try {
    long long v = std::stoll(env);
    if (v > 0) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::Config, std::string("W2LAB_BUDGET is not a positive integer: ") + env);
}

}  // namespace w2lab
