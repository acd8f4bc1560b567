#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "w2lab/measures.hpp"

namespace w2lab {

struct Coupling {
  std::int32_t source = 0;
  std::int32_t target = 0;
  double mass = 0.0;
};

struct SolverStats {
  std::int64_t pivots = 0;
  std::size_t arcs = 0;
  int pricing_rounds = 0;
  bool integer_masses = false;
  double tolerance = 0.0;
};

struct TransportPlan {
  std::vector<Coupling> couplings;
  // W2^2
  double cost = 0.0;
  std::vector<double> source_duals;
  std::vector<double> target_duals;
  double dual_objective = 0.0;
  SolverStats stats;
};

struct TransportOptions {
  // Materialized arcs; defaults to solver_budget().
  std::size_t arc_budget = 0;
  // Problems with at most this many pairs are solved on the complete graph.
  std::size_t dense_pairs = 200'000;
  int row_candidates = 6;
  int column_candidates = 3;
  int arcs_per_row_round = 4;
  int max_rounds = 200;
};

// Fills out[j] with the cost between source i and every target j.
using CostRows = std::function<void(int i, double* out)>;

// Exact transportation LP between weight vectors a and b.
TransportPlan solve_transport(const std::vector<double>& a, const std::vector<double>& b,
                              const CostRows& rows, double cost_bound,
                              const TransportOptions& opts = {});

CostRows squared_distance_rows(const SpaceModel& space, const std::vector<Point>& xs,
                               const std::vector<Point>& ys);

TransportPlan w2_discrete(const MeasureSpec& mu, const MeasureSpec& nu,
                          const TransportOptions& opts = {});

struct CertificateCheck {
  double max_marginal_error = 0.0;
  // max over all pairs of u_i + v_j - c_ij (should be <= 1e-8)
  double max_dual_violation = 0.0;
  // max over positive-mass arcs of |u_i + v_j - c_ij|
  double max_slackness_gap = 0.0;
  double cost_mismatch = 0.0;
  bool ok = false;
};

CertificateCheck verify_plan(const TransportPlan& plan, const std::vector<double>& a,
                             const std::vector<double>& b, const CostRows& rows);

// W2^2 between an atomic measure on the circle and an absolutely continuous one.
double w2_circle_exact(const MeasureSpec& mu, const MeasureSpec& nu);
double w2_circle_exact(const std::vector<Point>& points, const MeasureSpec& nu);

// Quantile-midpoint discretization of a circle law with the W2 error it induces.
struct CircleDiscretization {
  MeasureSpec measure;
  double w2_error = 0.0;
};
CircleDiscretization discretize_circle(const MeasureSpec& nu, int m);

enum class ReferenceKind { UniformGrid, WeightedGrid, HaarReference };

struct SemiDiscreteOptions {
  // Torus grid side m.
  int grid = 64;
  // Group reference set size and seed.
  int reference_size = 4096;
  std::uint64_t reference_seed = 0x5eed5eedULL;
  TransportOptions transport;
  // Check the duality certificate of every plan against the full cost matrix.
  bool verify = false;
};

struct SemiDiscreteResult {
  // W2 (not squared) against the reference.
  double value = 0.0;
  double error_bound = 0.0;
  bool certified = false;
  ReferenceKind reference = ReferenceKind::UniformGrid;
  TransportPlan plan;
  std::optional<CertificateCheck> certificate;
};

// W2 between the empirical measure of the points and the target, via a reference
// discretization of the target.
SemiDiscreteResult w2_semidiscrete(const std::vector<Point>& points, const MeasureSpec& target,
                                   const SemiDiscreteOptions& opts = {});
SemiDiscreteResult w2_semidiscrete(const SampleTrace& trace, const SpaceModel& space, int m);

struct MCEstimate {
  double mean = 0.0;
  double variance = 0.0;
  int replicates = 0;
  double ci_half_width = 0.0;
  std::uint64_t seed = 0;
  // W2-scale systematic band of the reference discretization; sqrt(mean) is off by at most this.
  double systematic_band = 0.0;
  bool band_certified = true;
  int plans_verified = 0;
  int plans_failed = 0;
  double max_dual_violation = 0.0;
  std::vector<double> values;
};

struct MCOptions {
  SemiDiscreteOptions semidiscrete;
  int threads = 1;
  // Called with (replicate, trace, W2^2) after each solve, in replicate order.
  std::function<void(int, const SampleTrace&, double)> observer;
};

MCEstimate mc_expected_w2sq(const ProcessSpec& process, const MeasureSpec& target, int R,
                            std::uint64_t seed, const MCOptions& opts = {});

// Student t quantile used for the confidence half-width.
double student_t_quantile(double p, double dof);
MCEstimate summarize(const std::vector<double>& values, std::uint64_t seed);

}  // namespace w2lab
