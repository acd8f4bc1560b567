#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "w2lab/common.hpp"

namespace w2lab {

enum class SpaceKind { Circle, FlatTorus, SU2, SO3 };

class SpaceModel {
 public:
  static SpaceModel circle();
  static SpaceModel flat_torus(int d);
  static SpaceModel su2();
  static SpaceModel so3();
  // Accepts "circle", "torus<d>", "torus:<d>", "su2", "so3".
  static SpaceModel parse(const std::string& name);

  SpaceKind kind() const { return kind_; }
  int dim() const { return dim_; }
  // Radius of the covering 3-sphere; 0 for tori.
  double radius_scale() const { return radius_; }
  bool is_torus() const { return kind_ == SpaceKind::Circle || kind_ == SpaceKind::FlatTorus; }
  bool is_group() const { return kind_ == SpaceKind::SU2 || kind_ == SpaceKind::SO3; }
  double ricci_term() const { return 0.0; }
  double diameter() const;
  std::string name() const;

  bool operator==(const SpaceModel&) const = default;

 private:
  SpaceModel(SpaceKind k, int d, double r) : kind_(k), dim_(d), radius_(r) {}
  SpaceKind kind_;
  int dim_;
  double radius_;
};

struct SpectrumEntry {
  double eigenvalue = 0.0;
  std::int64_t multiplicity = 0;
  // |k|^2 on tori, irrep dimension on groups.
  std::int64_t label = 0;
};

struct SpectrumSlice {
  std::vector<SpectrumEntry> entries;
  double cutoff = 0.0;
  // Bound on the omitted sum of e^{-lambda t}/lambda at tail_time; NaN without a time.
  double tail_bound = 0.0;
  double tail_time = 0.0;
};

struct SpectrumOptions {
  std::size_t max_entries = 2'000'000;
};

SpectrumSlice enumerate_spectrum(const SpaceModel& space, double cutoff,
                                 std::optional<double> tail_time = std::nullopt,
                                 const SpectrumOptions& opts = {});

// Number of k in Z^d with |k|^2 = n for n = 0..n_max.
std::vector<std::int64_t> lattice_counts(int d, std::int64_t n_max);

void validate_point(const SpaceModel& space, const Point& p);
// Torus: reduce mod 1. SO3: sign chosen with w >= 0.
Point canonical_point(const SpaceModel& space, const Point& p);
double geodesic_distance(const SpaceModel& space, const Point& x, const Point& y);
double squared_distance(const SpaceModel& space, const Point& x, const Point& y);

struct HeatSums {
  double trace = 0.0;
  double inv_sum = 0.0;
  double trace_tail_bound = 0.0;
  double inv_tail_bound = 0.0;
  double cutoff = 0.0;
};

// Partial sums over 0 < lambda <= cutoff with certified tails. With a tolerance,
// throws CutoffTooSmall when inv_tail_bound exceeds it.
HeatSums heat_sums(const SpaceModel& space, double t, double cutoff,
                   std::optional<double> tolerance = std::nullopt);

struct SpectralValue {
  double value = 0.0;
  double error_bound = 0.0;
  double upper() const { return value + error_bound; }
};

// Full sums over lambda > 0 evaluated through Jacobi theta functions (tori only).
struct ThetaHeatSums {
  SpectralValue trace;
  SpectralValue inv_sum;
};
ThetaHeatSums heat_sums_theta(const SpaceModel& space, double t);

// Full sum over lambda > 0 of mult * e^{-lambda t} / lambda, path chosen by t.
SpectralValue inv_heat_sum(const SpaceModel& space, double t, double tol = 1e-13);
// Full sum over lambda > 0 of mult * e^{-lambda t}.
SpectralValue heat_trace(const SpaceModel& space, double t, double tol = 1e-13);

// Sum over n in Z of exp(-a n^2).
double theta3(double a);

// Integral of P(t,x,y) rho(x,y)^2 dVol(y).
double dispersion_integral(const SpaceModel& space, double t);
SpectralValue dispersion_integral_detailed(const SpaceModel& space, double t);

}  // namespace w2lab
