#pragma once

#include <cmath>
#include <functional>

namespace w2lab {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

// Adaptive Simpson with absolute tolerance; throws QuadratureNonconvergence when
// max_depth is reached before the local error test passes.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int max_depth = 48);

}  // namespace w2lab
