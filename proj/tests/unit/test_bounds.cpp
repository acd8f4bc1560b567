#include <gtest/gtest.h>

#include <cmath>

#include "w2lab/bounds.hpp"
#include "w2lab/spectral.hpp"
#include "w2lab/transport.hpp"

using namespace w2lab;

namespace {

MeasureSpec cosine(const SpaceModel& s, double a) {
  TrigTerm t;
  t.k[0] = 1;
  t.a = a;
  return MeasureSpec::mixture(s, 1.0 - a, {t});
}

}  // namespace

TEST(CircleBound, ClosedForm) {
  EXPECT_NEAR(circle_bound(1.0, 0.0, 300), std::sqrt(2.0 / 900.0), 1e-15);
  EXPECT_NEAR(circle_bound(1.0, 0.0, 200), 0.057735026919, 1e-12);
  EXPECT_NEAR(circle_bound(1.0, 100.0, 50) / circle_bound(1.0, 400.0, 50), std::sqrt(1602.0 / 6402.0), 1e-12);
  EXPECT_THROW(circle_bound(0.0, 0.0, 10), Error);
}

TEST(Smoothing, EqualMeasuresGivePureSmoothingTerm) {
  const SpaceModel t2 = SpaceModel::flat_torus(2);
  MeasureSpec mu = cosine(t2, 0.5);
  BoundReport r = smoothing_rhs(mu, mu, 0.01);
  const double c1 = 1.0 + std::sqrt(0.5);
  EXPECT_NEAR(r.value, c1 * std::sqrt(2 * 0.01), 1e-12);
  EXPECT_EQ(r.component("spectral_sum"), 0.0);
}

TEST(Smoothing, UniformHasUnitConstants) {
  BoundReport r = smoothing_rhs(MeasureSpec::uniform(SpaceModel::circle()),
                                MeasureSpec::dirac(SpaceModel::circle(), make_point(0.0)), 0.01);
  EXPECT_EQ(r.component("c1"), 1.0);
  EXPECT_EQ(r.component("c2"), 1.0);
  // Exact W2(uniform, delta) = (1/12)^{1/2}
  EXPECT_GE(r.value, std::sqrt(1.0 / 12.0));
  EXPECT_GE(r.value, r.component("smoothing_term"));
  EXPECT_LE(r.component("tail_bound"), 1e-10);
}

TEST(Smoothing, ZeroLowerMassThrows) {
  const SpaceModel c = SpaceModel::circle();
  EXPECT_THROW(smoothing_rhs(MeasureSpec::dirac(c, make_point(0.1)), MeasureSpec::uniform(c), 0.01), Error);
}

TEST(Smoothing, TailToleranceEnforced) {
  const SpaceModel c = SpaceModel::circle();
  MeasureSpec mu = MeasureSpec::uniform(c);
  FourierPacket d = packet_difference(fourier_torus(MeasureSpec::dirac(c, make_point(0.2)), 2), fourier_torus(mu, 2));
  EXPECT_THROW(smoothing_rhs(mu, d, 1e-4, 1e-12), Error);
}

TEST(SmoothingProperty, RefinementIsMonotone) {
  const SpaceModel c = SpaceModel::circle();
  MeasureSpec mu = MeasureSpec::uniform(c);
  MeasureSpec nu = MeasureSpec::empirical(c, {make_point(0.1), make_point(0.45), make_point(0.8)});
  double prev = 1e300;
  for (int K : {2, 4, 8, 16, 32, 64}) {
    FourierPacket d = packet_difference(fourier_torus(nu, K), fourier_torus(mu, K));
    double v = smoothing_rhs(mu, d, 0.003).value;
    EXPECT_LE(v, prev * (1 + 1e-12)) << K;
    prev = v;
  }
}

TEST(SmoothingProperty, DominatesExactCircleDistance) {
  const SpaceModel c = SpaceModel::circle();
  MeasureSpec mu = MeasureSpec::uniform(c);
  MeasureSpec nu = MeasureSpec::empirical(c, {make_point(0.05), make_point(0.3), make_point(0.31), make_point(0.7)});
  const double w2 = std::sqrt(w2_circle_exact(nu, mu));
  for (double t : {1e-4, 1e-3, 1e-2, 0.1}) EXPECT_GE(smoothing_rhs(mu, nu, t).value, w2) << t;
}

TEST(MeanSquare, CircleIidEnergy) {
  const SpaceModel c = SpaceModel::circle();
  for (double t : {1e-6, 1e-3, 0.1}) {
    BoundReport r = mean_square_bound(ProcessSpec::iid(MeasureSpec::uniform(c), 100, 1), 100, t);
    EXPECT_LE(r.component("E"), 1.0 / 6.0);
    EXPECT_EQ(r.component("cross_term"), 0.0);
  }
}

TEST(MeanSquare, TorusEnergyGrowsLikeLogN) {
  // E(1/N) - log(N) / (4 pi) settles to a constant.
  const SpaceModel t2 = SpaceModel::flat_torus(2);
  auto gap = [&](std::int64_t N) {
    BoundReport r = mean_square_bound(ProcessSpec::iid(MeasureSpec::uniform(t2), N, 1), N, 1.0 / N);
    return r.component("E") - std::log(static_cast<double>(N)) / (4.0 * kPi);
  };
  EXPECT_NEAR(gap(1024), gap(4096), 5e-3);
  EXPECT_NEAR(gap(1024), gap(16384), 5e-3);
}

TEST(MeanSquare, MixtureCorrectionReducesEnergy) {
  const SpaceModel t2 = SpaceModel::flat_torus(2);
  BoundReport u = mean_square_bound(ProcessSpec::iid(MeasureSpec::uniform(t2), 100, 1), 100, 0.01);
  BoundReport m = mean_square_bound(ProcessSpec::iid(cosine(t2, 0.5), 100, 1), 100, 0.01);
  // sum e^{-lambda t}/lambda over |k| = 1 with |mu(k)|^2 = 1/16 at k = (+-1, 0)
  const double corr = 2.0 * 0.0625 * std::exp(-kFourPi2 * 0.01) / kFourPi2;
  EXPECT_NEAR(u.component("E") - m.component("E"), corr, 1e-12);
}

TEST(MeanSquare, TeleportAddsCrossTerm) {
  const SpaceModel t2 = SpaceModel::flat_torus(2);
  MeasureSpec mu = MeasureSpec::uniform(t2);
  BoundReport iid = mean_square_optimized(ProcessSpec::iid(mu, 1024, 1), 1024);
  BoundReport tp = mean_square_optimized(ProcessSpec::teleport(mu, 0.2, 1024, 1), 1024);
  EXPECT_GT(tp.value, iid.value);
  EXPECT_LE(tp.value, std::sqrt(17.0) * iid.value);
  EXPECT_GT(tp.component("cross_term"), 0.0);
}

TEST(MeanSquareProperty, OptimizedBoundNearRateConstant) {
  // Within a factor 2.5 of (4 pi)^{-1/2} (log N / N)^{1/2} on the 2-torus.
  const SpaceModel t2 = SpaceModel::flat_torus(2);
  for (std::int64_t N = 256; N <= 4096; N *= 2) {
    BoundReport r = mean_square_optimized(ProcessSpec::iid(MeasureSpec::uniform(t2), N, 1), N);
    const double rate = std::sqrt(std::log(static_cast<double>(N)) / N / (4.0 * kPi));
    EXPECT_LE(r.value, 2.5 * rate) << N;
    EXPECT_GE(r.value, rate) << N;
    EXPECT_FALSE(r.audit_grid.empty());
  }
}

TEST(Optimize, MonotoneFunctionHitsBoundary) {
  OptimizeResult r = optimize_t([](double t) { return std::sqrt(2 * t); }, 1e-6, 1.0);
  EXPECT_TRUE(r.at_boundary);
  EXPECT_NEAR(r.t_star, 1e-6, 1e-12);
}

TEST(Optimize, FindsInteriorMinimum) {
  // (log t - log 0.003)^2 + 1
  OptimizeResult r = optimize_t([](double t) { return std::pow(std::log(t / 0.003), 2) + 1.0; }, 1e-8, 1.0);
  EXPECT_FALSE(r.at_boundary);
  EXPECT_NEAR(std::log(r.t_star / 0.003), 0.0, 1e-5);
  EXPECT_NEAR(r.value, 1.0, 1e-9);
  EXPECT_EQ(r.grid.size(), 41u);
}

TEST(Optimize, RateFunctionalMatchesStationaryPoint) {
  // f(t) = (2t)^{1/2} + 2 (S(t)/N)^{1/2} on the 2-torus; f'(t) = 0 located by bisection.
  const SpaceModel t2 = SpaceModel::flat_torus(2);
  const double N = 1e4;
  auto S = [&](double t) { return inv_heat_sum(t2, t).value; };
  auto f = [&](double t) { return std::sqrt(2 * t) + 2 * std::sqrt(S(t) / N); };
  auto df = [&](double t) {
    const double h = 1e-5 * t;
    return (f(t + h) - f(t - h)) / (2 * h);
  };
  double lo = 1e-9, hi = 1e-2;
  for (int i = 0; i < 200; ++i) {
    double mid = std::sqrt(lo * hi);
    (df(mid) < 0 ? lo : hi) = mid;
  }
  OptimizeResult r = optimize_t(f, 1e-9, 1.0);
  EXPECT_NEAR(r.t_star / lo, 1.0, 1e-3);
}

TEST(Optimize, QFunctionalFollowsPowerRule) {
  // t^{d/2} proportional to q^2 at leading order: t*(0.1) / t*(0.05) close to 4^{2/3} for d = 3.
  const SpaceModel t3 = SpaceModel::flat_torus(3);
  double a = *q_w2_numeric(0.1, t3).t_star, b = *q_w2_numeric(0.05, t3).t_star;
  const double ratio = a / b, rule = std::pow(4.0, 2.0 / 3.0);
  EXPECT_GT(ratio, rule / 3.0);
  EXPECT_LT(ratio, rule * 3.0);
}

TEST(QBound, ClosedForms) {
  EXPECT_NEAR(q_w2_bound(0.25, SpaceModel::circle()).value, 0.25 / std::sqrt(3.0), 1e-15);
  EXPECT_EQ(q_w2_bound(0.0, SpaceModel::circle()).value, 0.0);
  EXPECT_THROW(q_w2_bound(1.5, SpaceModel::circle()), Error);
  const double q = 0.1;
  EXPECT_NEAR(q_w2_bound(q, SpaceModel::flat_torus(2)).value, q * std::sqrt(2.0 / kPi * std::log(1.0 / q)) + 3 * q,
              1e-15);
  EXPECT_NEAR(torus2_constant_audit(), 2.77, 0.01);
  EXPECT_GT(q_w2_bound(0.3, SpaceModel::su2()).value, 0.0);
}

TEST(QBoundProperty, NumericSlopeMatchesCircleClosedForm) {
  const SpaceModel c = SpaceModel::circle();
  for (double q : {1e-4, 1e-6}) {
    EXPECT_NEAR(q_w2_numeric(q, c).value / q, 1.0 / std::sqrt(3.0), 0.01 / std::sqrt(3.0)) << q;
  }
}

TEST(WalkBound, ClosedFormsAndBudget) {
  EXPECT_NEAR(rw_empirical_bound(0.0, 300, SpaceModel::circle()).value, 1.0 / std::sqrt(900.0), 1e-15);
  EXPECT_NEAR(walk_budget(0.5), 1.0, 1e-15);
  EXPECT_THROW(walk_budget(1.0), Error);
  double prev = 1e300;
  for (std::int64_t N = 16; N <= 1 << 16; N *= 4) {
    double v = rw_empirical_bound(2.0, N, SpaceModel::su2()).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Semisimple, ExponentsAndMonotonicity) {
  const SpaceModel su2 = SpaceModel::su2();
  BoundReport e = semisimple_pipeline(GapInput{}, PipelineMode::Empirical, 1000, su2);
  EXPECT_NEAR(e.component("rate_exponent_N"), -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(e.component("log_exponent"), 2.0 / 3.0, 1e-15);
  double b27 = semisimple_pipeline(GapInput{}, PipelineMode::Walk, 27, su2).value;
  double b64 = semisimple_pipeline(GapInput{}, PipelineMode::Walk, 64, su2).value;
  EXPECT_LT(b64, b27);
  EXPECT_NEAR(semisimple_a0(1.0, 3), 0.4, 1e-6);
  EXPECT_THROW(semisimple_pipeline(GapInput{0.0, 1}, PipelineMode::Walk, 27, su2), Error);
}

TEST(Semisimple, WalkBoundIsStretchedExponential) {
  // With t = n^{1/3} exp(-a0 n^{1/3}) the bound carries a (3 n^{1/3})^{1/2} prefactor; past it,
  // log bound against n^{1/3} is a line of slope -a0 / 2.
  const SpaceModel su2 = SpaceModel::su2();
  std::vector<double> x, y;
  for (int m = 3; m <= 10; ++m) {
    x.push_back(m);
    BoundReport r = semisimple_pipeline(GapInput{}, PipelineMode::Walk, m * m * m, su2);
    y.push_back(std::log(r.value / std::sqrt(3.0 * m)));
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx), icpt = (sy - slope * sx) / n;
  const double range = y.front() - y.back();
  EXPECT_NEAR(slope, -semisimple_a0(1.0, 3) / 2.0, 0.05 * semisimple_a0(1.0, 3) / 2.0);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y[i], slope * x[i] + icpt, 0.05 * range) << x[i];
}

TEST(Quantization, TorusScaling) {
  const SpaceModel t2 = SpaceModel::flat_torus(2);
  BoundReport a = quantization_floor(100, t2), b = quantization_floor(800, t2);
  EXPECT_NEAR(b.value / a.value, std::pow(8.0, -0.5), 1e-12);
  EXPECT_NEAR(a.component("packing_radius"), 0.1 / std::sqrt(kPi), 1e-15);
  EXPECT_NEAR(a.value, 0.1 / std::sqrt(kPi) * std::sqrt(0.5), 1e-15);
}

TEST(Quantization, GroupScalingForSmallCaps) {
  const SpaceModel su2 = SpaceModel::su2();
  double a = quantization_floor(10000, su2).value, b = quantization_floor(80000, su2).value;
  EXPECT_NEAR(b / a, 0.5, 0.005);
  BoundReport one = quantization_floor(1, su2);
  EXPECT_GT(one.value, 0.0);
  EXPECT_LE(one.value, su2.diameter());
}
