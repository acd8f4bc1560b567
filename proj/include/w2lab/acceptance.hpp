#pragma once

#include <functional>
#include <string>
#include <vector>

namespace w2lab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;
};

struct AcceptanceOptions {
  int threads = 1;
  std::function<void(const std::string&)> progress;
};

// Criteria 1..10; see list_experiments() for the matching catalog entries.
CriterionResult run_criterion(int id, const AcceptanceOptions& opts = {});
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& opts = {});

std::string format_result(const CriterionResult& r);

// Minimum cost over the basic feasible solutions of a small transportation problem.
double brute_force_transport(const std::vector<double>& a, const std::vector<double>& b,
                             const std::vector<std::vector<double>>& cost);

}  // namespace w2lab
