#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "w2lab/network_simplex.hpp"
#include "w2lab/rng.hpp"
#include "w2lab/transport.hpp"

using namespace w2lab;

namespace {

// Equal-weight n x n problems are assignment problems; vertices are permutations.
double best_permutation(const std::vector<std::vector<double>>& c) {
  std::vector<int> p(c.size());
  std::iota(p.begin(), p.end(), 0);
  double best = 1e300;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += c[i][p[i]];
    best = std::min(best, s);
  } while (std::next_permutation(p.begin(), p.end()));
  return best / static_cast<double>(c.size());
}

CostRows matrix_rows(const std::vector<std::vector<double>>& c) {
  return [&c](int i, double* out) {
    for (std::size_t j = 0; j < c[i].size(); ++j) out[j] = c[i][j];
  };
}

}  // namespace

TEST(Transport, AssignmentOracle) {
  Rng rng(21, 0);
  for (int inst = 0; inst < 60; ++inst) {
    const int n = 1 + static_cast<int>(rng.below(6));
    std::vector<std::vector<double>> c(n, std::vector<double>(n));
    for (auto& row : c) {
      for (auto& x : row) x = rng.uniform();
    }
    std::vector<double> a(n, 1.0 / n);
    TransportPlan plan = solve_transport(a, a, matrix_rows(c), 1.0);
    EXPECT_NEAR(plan.cost, best_permutation(c), 1e-12);
    EXPECT_NEAR(plan.dual_objective, plan.cost, 1e-12);
  }
}

TEST(Transport, DualCertificateOnRandomInstances) {
  Rng rng(22, 0);
  for (int inst = 0; inst < 10; ++inst) {
    const int n = 20 + static_cast<int>(rng.below(60)), m = 20 + static_cast<int>(rng.below(60));
    std::vector<double> a(n), b(m);
    for (auto& x : a) x = rng.uniform_open();
    for (auto& x : b) x = rng.uniform_open();
    double sa = std::accumulate(a.begin(), a.end(), 0.0), sb = std::accumulate(b.begin(), b.end(), 0.0);
    for (auto& x : a) x /= sa;
    for (auto& x : b) x /= sb;
    std::vector<Point> xs(n), ys(m);
    for (auto& p : xs) p = make_point(rng.uniform(), rng.uniform());
    for (auto& p : ys) p = make_point(rng.uniform(), rng.uniform());
    const SpaceModel t2 = SpaceModel::flat_torus(2);
    CostRows rows = squared_distance_rows(t2, xs, ys);
    TransportPlan plan = solve_transport(a, b, rows, 0.5);
    CertificateCheck chk = verify_plan(plan, a, b, rows);
    EXPECT_TRUE(chk.ok) << chk.max_marginal_error << " " << chk.max_dual_violation << " " << chk.max_slackness_gap;
    // Sparse optimal plans: at most n + m - 1 positive entries.
    EXPECT_LE(plan.couplings.size(), static_cast<std::size_t>(n + m - 1));
  }
}

TEST(Transport, ColumnGenerationAgreesWithDense) {
  Rng rng(23, 0);
  const int n = 300, m = 900;
  std::vector<Point> xs(n), ys(m);
  for (auto& p : xs) p = make_point(rng.uniform(), rng.uniform());
  for (auto& p : ys) p = make_point(rng.uniform(), rng.uniform());
  std::vector<double> a(n, 1.0 / n), b(m, 1.0 / m);
  CostRows rows = squared_distance_rows(SpaceModel::flat_torus(2), xs, ys);
  TransportOptions dense;
  dense.dense_pairs = 1'000'000;
  TransportOptions sparse;
  sparse.dense_pairs = 0;
  TransportPlan p1 = solve_transport(a, b, rows, 0.5, dense);
  TransportPlan p2 = solve_transport(a, b, rows, 0.5, sparse);
  EXPECT_NEAR(p1.cost, p2.cost, 1e-12);
  EXPECT_GT(p2.stats.pricing_rounds, 0);
  EXPECT_LT(p2.stats.arcs, static_cast<std::size_t>(n) * m);
}

TEST(Transport, BudgetAndFeasibilityErrors) {
  std::vector<double> a{0.5, 0.5}, b{0.3, 0.3};
  std::vector<std::vector<double>> c{{0, 1}, {1, 0}};
  EXPECT_THROW(solve_transport(a, b, matrix_rows(c), 1.0), Error);
  TransportOptions tiny;
  tiny.arc_budget = 2;
  std::vector<double> u{0.5, 0.5};
  EXPECT_THROW(solve_transport(u, u, matrix_rows(c), 1.0, tiny), Error);
}

TEST(NetworkSimplex, ReducedCostsNonnegative) {
  Rng rng(24, 0);
  std::vector<double> a(8, 1.0 / 8), b(5, 1.0 / 5);
  NetworkSimplex ns(a, b, 1.0);
  std::vector<std::vector<double>> c(8, std::vector<double>(5));
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 5; ++j) {
      c[i][j] = rng.uniform();
      ns.add_arc(i, j, c[i][j]);
    }
  }
  ASSERT_EQ(ns.solve(), NetworkSimplex::Status::Optimal);
  EXPECT_LT(ns.artificial_flow(), 1e-12);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 5; ++j) EXPECT_GE(c[i][j] - ns.source_dual(i) - ns.target_dual(j), -1e-12);
  }
}

TEST(Circle, DiracAgainstUniform) {
  const SpaceModel c = SpaceModel::circle();
  // int_{-1/2}^{1/2} x^2 dx
  EXPECT_NEAR(w2_circle_exact(MeasureSpec::dirac(c, make_point(0.3)), MeasureSpec::uniform(c)), 1.0 / 12.0, 1e-13);
}

TEST(Circle, CosineMixtureClosedForm) {
  // Uniform to 1 + a cos(2 pi x): the map moves y by (a / 2 pi) sin(2 pi y), cost a^2 / (8 pi^2).
  const SpaceModel c = SpaceModel::circle();
  for (double a : {0.3, 0.5, 0.9}) {
    TrigTerm t;
    t.k[0] = 1;
    t.a = a;
    double w = w2_circle_exact(MeasureSpec::mixture(c, 1.0 - a, {t}), MeasureSpec::uniform(c));
    EXPECT_NEAR(w, a * a / (8.0 * kPi * kPi), 1e-10) << a;
  }
}

TEST(Circle, EquallySpacedPoints) {
  // m equally spaced atoms against uniform: each atom covers a cell of width 1/m.
  const SpaceModel c = SpaceModel::circle();
  for (int m : {1, 3, 10}) {
    std::vector<Point> pts;
    for (int i = 0; i < m; ++i) pts.push_back(make_point((i + 0.5) / m));
    EXPECT_NEAR(w2_circle_exact(pts, MeasureSpec::uniform(c)), 1.0 / (12.0 * m * m), 1e-12);
  }
}

TEST(Circle, ExactSolverMatchesDiscreteSolver) {
  const SpaceModel c = SpaceModel::circle();
  Rng rng(25, 0);
  std::vector<Point> pts;
  for (int i = 0; i < 9; ++i) pts.push_back(make_point(rng.uniform()));
  const int m = 2000;
  std::vector<Point> grid;
  for (int i = 0; i < m; ++i) grid.push_back(make_point((i + 0.5) / m));
  TransportPlan plan = w2_discrete(MeasureSpec::empirical(c, pts), MeasureSpec::empirical(c, grid));
  const double exact = std::sqrt(w2_circle_exact(pts, MeasureSpec::uniform(c)));
  EXPECT_NEAR(std::sqrt(plan.cost), exact, 1.0 / (std::sqrt(12.0) * m) + 1e-9);
}

TEST(Circle, DiscretizationErrorIsExactForUniform) {
  CircleDiscretization d = discretize_circle(MeasureSpec::uniform(SpaceModel::circle()), 50);
  EXPECT_NEAR(d.w2_error, 1.0 / (std::sqrt(12.0) * 50), 1e-12);
  EXPECT_EQ(d.measure.atoms().points.size(), 50u);
}

TEST(SemiDiscrete, GridRefinementStaysInBand) {
  const SpaceModel t2 = SpaceModel::flat_torus(2);
  SampleTrace tr = sample(ProcessSpec::iid(MeasureSpec::uniform(t2), 100, 31));
  SemiDiscreteOptions o1, o2;
  o1.grid = 24;
  o2.grid = 64;
  o1.verify = o2.verify = true;
  auto r1 = w2_semidiscrete(tr.points, MeasureSpec::uniform(t2), o1);
  auto r2 = w2_semidiscrete(tr.points, MeasureSpec::uniform(t2), o2);
  EXPECT_TRUE(r1.certified);
  EXPECT_LE(std::abs(r1.value - r2.value), r1.error_bound + r2.error_bound);
  ASSERT_TRUE(r1.certificate && r2.certificate);
  EXPECT_TRUE(r1.certificate->ok && r2.certificate->ok);
}

TEST(SemiDiscrete, GroupReferenceIsHeuristic) {
  const SpaceModel su2 = SpaceModel::su2();
  SampleTrace tr = sample(ProcessSpec::iid(MeasureSpec::uniform(su2), 32, 2));
  SemiDiscreteOptions o;
  o.reference_size = 512;
  auto r = w2_semidiscrete(tr.points, MeasureSpec::uniform(su2), o);
  EXPECT_FALSE(r.certified);
  EXPECT_EQ(r.reference, ReferenceKind::HaarReference);
  EXPECT_GT(r.value, 0.0);
  EXPECT_LT(r.value, su2.diameter());
}

TEST(MonteCarlo, SummaryStatistics) {
  MCEstimate e = summarize({1.0, 2.0, 3.0, 4.0}, 0);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_NEAR(e.variance, 5.0 / 3.0, 1e-15);
  EXPECT_NEAR(student_t_quantile(0.975, 10), 2.228138851986, 1e-9);
  EXPECT_NEAR(e.ci_half_width, student_t_quantile(0.975, 3) * std::sqrt(5.0 / 12.0), 1e-12);
}

TEST(MonteCarlo, ReproducibleAcrossThreads) {
  auto proc = ProcessSpec::iid(MeasureSpec::uniform(SpaceModel::flat_torus(2)), 64, 1);
  MCOptions o1, o2;
  o1.semidiscrete.grid = o2.semidiscrete.grid = 16;
  o2.threads = 3;
  MCEstimate a = mc_expected_w2sq(proc, MeasureSpec::uniform(SpaceModel::flat_torus(2)), 6, 77, o1);
  MCEstimate b = mc_expected_w2sq(proc, MeasureSpec::uniform(SpaceModel::flat_torus(2)), 6, 77, o2);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.mean, b.mean);
}

TEST(MonteCarlo, CircleMeanNearFourierValue) {
  // E W2^2 of N i.i.d. uniform points on the circle is close to 1/(12 N).
  const SpaceModel c = SpaceModel::circle();
  const int N = 200;
  MCEstimate e = mc_expected_w2sq(ProcessSpec::iid(MeasureSpec::uniform(c), N, 1), MeasureSpec::uniform(c), 400, 5);
  EXPECT_NEAR(e.mean, 1.0 / (12.0 * N), 3.0 * e.ci_half_width + 1e-5);
}
