#include <gtest/gtest.h>

#include <cmath>

#include "w2lab/measures.hpp"
#include "w2lab/quadrature.hpp"
#include "w2lab/rng.hpp"

using namespace w2lab;

TEST(Philox, KnownAnswers) {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  EXPECT_EQ(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::block(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::block(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  Rng a(42, 3), b(42, 3), c(42, 4);
  bool differ = false;
  for (int i = 0; i < 100; ++i) {
    double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    if (x != c.uniform()) differ = true;
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
  EXPECT_TRUE(differ);
}

TEST(Measures, MixtureValidation) {
  const SpaceModel c = SpaceModel::circle();
  TrigTerm t;
  t.k[0] = 1;
  t.a = 0.5;
  EXPECT_NO_THROW(MeasureSpec::mixture(c, 0.5, {t}));
  EXPECT_THROW(MeasureSpec::mixture(c, 0.9, {t}), Error);
  EXPECT_NEAR(MeasureSpec::mixture(c, 0.5, {t}).density(make_point(0.5)), 0.5, 1e-15);
}

TEST(Measures, AtomicValidation) {
  const SpaceModel c = SpaceModel::circle();
  EXPECT_THROW(MeasureSpec::atomic(c, {make_point(0.1)}, {0.5}), Error);
  EXPECT_THROW(MeasureSpec::atomic(c, {make_point(0.1), make_point(0.2)}, {1.2, -0.2}), Error);
  EXPECT_NO_THROW(MeasureSpec::atomic(c, {make_point(0.1), make_point(0.2)}, {0.25, 0.75}));
}

TEST(Sampling, MixtureMomentMatchesDensity) {
  // E cos(2 pi x) under 1 + a cos(2 pi x) is a / 2.
  const SpaceModel c = SpaceModel::circle();
  TrigTerm t;
  t.k[0] = 1;
  t.a = 0.6;
  const int N = 200000;
  SampleTrace tr = sample(ProcessSpec::iid(MeasureSpec::mixture(c, 0.4, {t}), N, 11));
  double s = 0.0;
  for (const auto& p : tr.points) s += std::cos(kTwoPi * p[0]);
  const double se = std::sqrt(0.5 / N);
  EXPECT_NEAR(s / N, 0.3, 5.0 * se);
}

TEST(Sampling, HaarSecondMoments) {
  // Each quaternion coordinate has E x^2 = 1/4 under Haar measure on SU2.
  const int N = 100000;
  SampleTrace tr = sample(ProcessSpec::iid(MeasureSpec::uniform(SpaceModel::su2()), N, 5));
  for (int i = 0; i < 4; ++i) {
    double s = 0.0;
    for (const auto& p : tr.points) s += p[i] * p[i];
    EXPECT_NEAR(s / N, 0.25, 0.005);
  }
}

TEST(Sampling, SameSeedSameTrace) {
  auto proc = ProcessSpec::iid(MeasureSpec::uniform(SpaceModel::flat_torus(2)), 50, 99);
  EXPECT_EQ(sample(proc, 2).points, sample(proc, 2).points);
  EXPECT_NE(sample(proc, 2).points, sample(proc, 3).points);
  EXPECT_NE(sample(proc, 2).points, sample(proc.with_seed(100), 2).points);
}

TEST(Sampling, TeleportRefreshRate) {
  const double theta = 0.2;
  const int N = 50000;
  SampleTrace tr = sample(ProcessSpec::teleport(MeasureSpec::uniform(SpaceModel::circle()), theta, N, 3));
  const double expected = theta * (N - 1);
  EXPECT_NEAR(static_cast<double>(tr.refreshes), expected, 5.0 * std::sqrt(expected));
}

TEST(Sampling, WalkStaysOnGroup) {
  // Steps uniformly from {g, g^-1} with g of angle 0.3.
  const SpaceModel su2 = SpaceModel::su2();
  Point g = make_point(std::cos(0.3), std::sin(0.3), 0, 0);
  auto step = MeasureSpec::atomic(su2, {g, quat_conj(g)}, {0.5, 0.5});
  SampleTrace tr = sample(ProcessSpec::walk(step, 200, 1));
  ASSERT_EQ(tr.points.size(), 200u);
  for (const auto& p : tr.points) {
    EXPECT_NEAR(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3], 1.0, 1e-10);
  }
}

TEST(Sampling, TwoIslandPointsStayInIslands) {
  auto proc = ProcessSpec::two_island(SpaceModel::flat_torus(2), 1000, 4);
  int left = 0;
  for (const auto& p : sample(proc).points) {
    EXPECT_LT(p[1], 0.25);
    bool a = p[0] < 0.25, b = p[0] >= 0.5 && p[0] < 0.75;
    EXPECT_TRUE(a || b);
    left += a;
  }
  EXPECT_NEAR(left, 500, 5 * std::sqrt(250.0));
  EXPECT_EQ(lower_mass_constant(proc.stationary()), 0.0);
}

TEST(Mixing, Budgets) {
  auto mu = MeasureSpec::uniform(SpaceModel::flat_torus(2));
  MixingBudget iid = mixing_budget(ProcessSpec::iid(mu, 10, 1), 10);
  EXPECT_EQ(iid.B_beta, 0.0);
  EXPECT_EQ(iid.c, 1.0);
  MixingBudget tp = mixing_budget(ProcessSpec::teleport(mu, 0.2, 10, 1), 10);
  EXPECT_NEAR(tp.B_beta, 4.0, 1e-12);
  EXPECT_LE(tp.B_alpha, tp.B_beta);
}

TEST(Quaternion, GroupLaws) {
  Rng rng(1, 1);
  for (int i = 0; i < 50; ++i) {
    Point p = quat_normalize(make_point(rng.normal(), rng.normal(), rng.normal(), rng.normal()));
    Point q = quat_normalize(make_point(rng.normal(), rng.normal(), rng.normal(), rng.normal()));
    Point e = quat_mul(p, quat_conj(p));
    EXPECT_NEAR(e[0], 1.0, 1e-12);
    Point pq3 = quat_pow(quat_mul(p, q), 3);
    Point direct = quat_mul(quat_mul(quat_mul(p, q), quat_mul(p, q)), quat_mul(p, q));
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(pq3[k], direct[k], 1e-12);
  }
}

TEST(CircleLaw, QuantileInvertsCdf) {
  TrigTerm t;
  t.k[0] = 1;
  t.a = 0.5;
  t.b = 0.2;
  CircleLaw law(MeasureSpec::mixture(SpaceModel::circle(), 0.4, {t}));
  for (double u = -0.9; u < 1.9; u += 0.137) EXPECT_NEAR(law.cdf(law.quantile(u)), u, 1e-12);
  EXPECT_NEAR(law.cdf(1.3) - law.cdf(0.3), 1.0, 1e-14);
}

TEST(CircleLaw, MomentMatchesQuadrature) {
  TrigTerm t;
  t.k[0] = 2;
  t.a = 0.3;
  CircleLaw law(MeasureSpec::mixture(SpaceModel::circle(), 0.7, {t}));
  const double x = 0.37, y0 = 0.1, y1 = 0.8;
  auto f = [&](double y) { return (x - y) * (x - y) * (1.0 + 0.3 * std::cos(2.0 * kTwoPi * y)); };
  EXPECT_NEAR(law.moment(x, y0, y1), adaptive_simpson(f, y0, y1, 1e-14).value, 1e-12);
}
