#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "w2lab/acceptance.hpp"

// Usage: w2lab_acceptance [criterion ...]
int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) {
    for (int i = 1; i <= 10; ++i) ids.push_back(i);
  }
  w2lab::AcceptanceOptions opts;
  if (const char* t = std::getenv("W2LAB_THREADS")) opts.threads = std::max(1, std::atoi(t));
  opts.progress = [](const std::string& s) { std::cerr << "  " << s << "\n"; };
  int failed = 0;
  for (int id : ids) {
    w2lab::CriterionResult r = w2lab::run_criterion(id, opts);
    std::cout << w2lab::format_result(r) << std::endl;
    if (!r.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
