#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace w2lab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kFourPi2 = 4.0 * std::numbers::pi * std::numbers::pi;

enum class ErrorCode {
  InvalidArgument,
  EntryLimit,
  CutoffTooSmall,
  QuadratureNonconvergence,
  SamplerStall,
  Unsupported,
  Infeasible,
  BudgetExceeded,
  DensityViolation,
  NonQualifyingPrime,
  Config,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Torus coordinates use the first d slots; group points store (w, x, y, z).
struct Point {
  std::array<double, 4> c{};

  double& operator[](std::size_t i) { return c[i]; }
  double operator[](std::size_t i) const { return c[i]; }
  bool operator==(const Point&) const = default;
};

inline Point make_point(double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  return Point{{a, b, c, d}};
}

// Neumaier summation.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  KahanSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Arc budget for the transport solver; W2LAB_BUDGET overrides the default.
std::size_t solver_budget();

}  // namespace w2lab
