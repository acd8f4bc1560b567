#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "w2lab/harmonic.hpp"
#include "w2lab/measures.hpp"

namespace w2lab {

struct BoundComponent {
  std::string name;
  double value = 0.0;
};

struct BoundReport {
  double value = 0.0;
  std::optional<double> t_star;
  std::vector<BoundComponent> components;
  std::string formula_id;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::string> warnings;
  // (t, value) pairs visited by the optimizer, when one ran.
  std::vector<std::pair<double, double>> audit_grid;

  // Throws InvalidArgument for unknown names.
  double component(const std::string& name) const;
  bool has_component(const std::string& name) const;
};

struct OptimizeResult {
  double t_star = 0.0;
  double value = 0.0;
  std::vector<std::pair<double, double>> grid;
  bool at_boundary = false;
};

// Log-grid scan followed by golden-section refinement on log t.
OptimizeResult optimize_t(const std::function<double(double)>& evaluator, double t_lo, double t_hi,
                          int grid_points = 41, double rel_tol = 1e-6);

// Smoothing inequality for W2(mu, nu) given the packet of mu - nu.
BoundReport smoothing_rhs(const MeasureSpec& mu, const FourierPacket& coeff_diff, double t,
                          std::optional<double> tail_tolerance = std::nullopt);
// Same, building the packet with a cutoff large enough that 4 * tail <= tail_tolerance.
BoundReport smoothing_rhs(const MeasureSpec& mu, const MeasureSpec& nu, double t,
                          double tail_tolerance = 1e-10);

// Mean-square empirical bound for stationary weakly dependent samples at fixed t.
BoundReport mean_square_bound(const ProcessSpec& process, std::int64_t N, double t);
// mean_square_bound minimized over t in [t_lo, t_hi].
BoundReport mean_square_optimized(const ProcessSpec& process, std::int64_t N, double t_lo = 1e-9,
                                  double t_hi = 1.0);

// sqrt((2 + 16 B) / (3 c N))
double circle_bound(double c, double B, std::int64_t N);

// Constant term of the lattice-sum estimate on the 2-torus.
double gauss_circle_tau();
// 2^{1/2} + 2 tau^{1/2}
double torus2_constant_audit();

// W2(nu, Vol) from the spectral radius q(nu).
BoundReport q_w2_bound(double q, const SpaceModel& space);
// Numeric branch: min over t of (d t)^{1/2} + 2 q (sum e^{-lambda t} / lambda)^{1/2}.
BoundReport q_w2_numeric(double q, const SpaceModel& space);

// Mean-square empirical bound for random walks with budget B.
BoundReport rw_empirical_bound(double B, std::int64_t N, const SpaceModel& space);
// B = p / (1 - p) for steps with operator norm at most p.
double walk_budget(double p);

struct GapInput {
  double b = 1.0;
  int m0 = 1;
};

enum class PipelineMode { Walk, Empirical };

// a0 maximizing the slowest of the three exponents in the walk-mode balance.
double semisimple_a0(double b, int d);
BoundReport semisimple_pipeline(const GapInput& gap, PipelineMode mode, std::int64_t n,
                                const SpaceModel& space);

// Ball-packing lower bound on W2 for measures with at most N atoms.
BoundReport quantization_floor(std::int64_t N_atoms, const SpaceModel& space);

}  // namespace w2lab
