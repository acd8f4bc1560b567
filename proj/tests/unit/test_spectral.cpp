#include <gtest/gtest.h>

#include <cmath>

#include "w2lab/quadrature.hpp"
#include "w2lab/rng.hpp"
#include "w2lab/spectral.hpp"

using namespace w2lab;

namespace {

double brute_inv_sum_torus(int d, double t, int K) {
  double s = 0.0;
  if (d == 1) {
    for (int k = 1; k <= K; ++k) s += 2.0 * std::exp(-kFourPi2 * k * k * t) / (kFourPi2 * k * k);
    return s;
  }
  for (int a = -K; a <= K; ++a) {
    for (int b = -K; b <= K; ++b) {
      if (d == 2) {
        int n = a * a + b * b;
        if (n) s += std::exp(-kFourPi2 * n * t) / (kFourPi2 * n);
      } else {
        for (int c = -K; c <= K; ++c) {
          int n = a * a + b * b + c * c;
          if (n) s += std::exp(-kFourPi2 * n * t) / (kFourPi2 * n);
        }
      }
    }
  }
  return s;
}

Point random_point(const SpaceModel& s, Rng& rng) {
  if (s.is_torus()) {
    Point p;
    for (int i = 0; i < s.dim(); ++i) p[i] = rng.uniform();
    return p;
  }
  Point p = make_point(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]);
  for (int i = 0; i < 4; ++i) p[i] /= n;
  return canonical_point(s, p);
}

}  // namespace

TEST(Spectral, LatticeCountsMatchBruteForce) {
  for (int d = 1; d <= 3; ++d) {
    auto counts = lattice_counts(d, 30);
    std::vector<std::int64_t> brute(31, 0);
    const int R = 6;
    for (int a = -R; a <= R; ++a) {
      for (int b = (d > 1 ? -R : 0); b <= (d > 1 ? R : 0); ++b) {
        for (int c = (d > 2 ? -R : 0); c <= (d > 2 ? R : 0); ++c) {
          int n = a * a + b * b + c * c;
          if (n <= 30) ++brute[n];
        }
      }
    }
    for (int n = 0; n <= 30; ++n) EXPECT_EQ(counts[n], brute[n]) << "d=" << d << " n=" << n;
  }
}

TEST(Spectral, CircleSpectrum) {
  auto sl = enumerate_spectrum(SpaceModel::circle(), 4.0 * kFourPi2 + 1.0);
  ASSERT_EQ(sl.entries.size(), 2u);
  EXPECT_NEAR(sl.entries[0].eigenvalue, kFourPi2, 1e-12);
  EXPECT_EQ(sl.entries[0].multiplicity, 2);
  EXPECT_NEAR(sl.entries[1].eigenvalue, 4.0 * kFourPi2, 1e-12);
}

TEST(Spectral, GroupSpectraUseUnitVolume) {
  const double r = std::pow(2.0 * kPi * kPi, -1.0 / 3.0);
  auto su2 = enumerate_spectrum(SpaceModel::su2(), 100.0);
  ASSERT_FALSE(su2.entries.empty());
  EXPECT_NEAR(su2.entries[0].eigenvalue, 3.0 / (r * r), 1e-9);
  EXPECT_EQ(su2.entries[0].multiplicity, 4);
  const double rp = std::pow(kPi, -2.0 / 3.0);
  auto so3 = enumerate_spectrum(SpaceModel::so3(), 100.0);
  ASSERT_FALSE(so3.entries.empty());
  // Only odd-dimensional irreps descend to SO3.
  EXPECT_NEAR(so3.entries[0].eigenvalue, 8.0 / (rp * rp), 1e-9);
  EXPECT_EQ(so3.entries[0].multiplicity, 9);
}

TEST(Spectral, InvHeatSumCircleLimit) {
  // sum over k != 0 of 1 / (4 pi^2 k^2) = 1/12
  EXPECT_NEAR(inv_heat_sum(SpaceModel::circle(), 1e-12).value, 1.0 / 12.0, 1e-6);
  for (double t : {1e-4, 1e-2, 0.3}) {
    EXPECT_NEAR(inv_heat_sum(SpaceModel::circle(), t).value, brute_inv_sum_torus(1, t, 20000), 1e-11) << t;
  }
}

TEST(Spectral, InvHeatSumTorusMatchesLatticeSum) {
  for (double t : {0.01, 0.05, 0.5}) {
    EXPECT_NEAR(inv_heat_sum(SpaceModel::flat_torus(2), t).value, brute_inv_sum_torus(2, t, 60), 1e-10) << t;
    EXPECT_NEAR(inv_heat_sum(SpaceModel::flat_torus(3), t).value, brute_inv_sum_torus(3, t, 25), 1e-9) << t;
  }
}

TEST(Spectral, HeatSumsTailIsCertified) {
  for (const auto& s : {SpaceModel::circle(), SpaceModel::flat_torus(2), SpaceModel::su2(), SpaceModel::so3()}) {
    for (double t : {1e-3, 1e-2, 1e-1}) {
      const double full = inv_heat_sum(s, t).value;
      HeatSums h = heat_sums(s, t, 2000.0);
      EXPECT_LE(h.inv_sum, full * (1 + 1e-12)) << s.name();
      EXPECT_GE(h.inv_sum + h.inv_tail_bound, full * (1 - 1e-12)) << s.name();
    }
  }
}

TEST(Spectral, HeatSumsToleranceThrows) {
  EXPECT_THROW(heat_sums(SpaceModel::flat_torus(2), 1e-4, 100.0, 1e-12), Error);
}

TEST(Spectral, Theta3MatchesDirectSum) {
  for (double a : {0.01, 0.5, 3.0}) {
    double s = 0.0;
    for (int n = -2000; n <= 2000; ++n) s += std::exp(-a * n * n);
    EXPECT_NEAR(theta3(a), s, 1e-12 * s);
  }
}

TEST(Spectral, DistanceExamples) {
  EXPECT_NEAR(geodesic_distance(SpaceModel::circle(), make_point(0.1), make_point(0.9)), 0.2, 1e-15);
  const SpaceModel su2 = SpaceModel::su2();
  EXPECT_NEAR(geodesic_distance(su2, make_point(1, 0, 0, 0), make_point(-1, 0, 0, 0)), su2.diameter(), 1e-12);
  EXPECT_NEAR(geodesic_distance(SpaceModel::so3(), make_point(1, 0, 0, 0), make_point(-1, 0, 0, 0)), 0.0, 1e-12);
}

TEST(SpectralProperty, DistanceIsAMetric) {
  Rng rng(7, 0);
  for (const auto& s : {SpaceModel::circle(), SpaceModel::flat_torus(2), SpaceModel::flat_torus(3),
                        SpaceModel::su2(), SpaceModel::so3()}) {
    for (int it = 0; it < 300; ++it) {
      Point x = random_point(s, rng), y = random_point(s, rng), z = random_point(s, rng);
      double dxy = geodesic_distance(s, x, y), dyx = geodesic_distance(s, y, x);
      EXPECT_NEAR(dxy, dyx, 1e-12);
      EXPECT_LE(dxy, geodesic_distance(s, x, z) + geodesic_distance(s, z, y) + 1e-12);
      EXPECT_LE(dxy, s.diameter() + 1e-12);
      EXPECT_NEAR(squared_distance(s, x, y), dxy * dxy, 1e-12);
    }
  }
}

TEST(Spectral, CircleDispersionMatchesQuadrature) {
  // P(t, 0, y) = 1 + 2 sum cos(2 pi k y) e^{-4 pi^2 k^2 t}
  for (double t : {1e-3, 1e-2, 0.1}) {
    auto f = [t](double y) {
      double p = 1.0;
      for (int k = 1; k < 400; ++k) p += 2.0 * std::cos(kTwoPi * k * y) * std::exp(-kFourPi2 * k * k * t);
      return p * y * y;
    };
    double direct = 2.0 * adaptive_simpson(f, 0.0, 0.5, 1e-13).value;
    EXPECT_NEAR(dispersion_integral(SpaceModel::circle(), t), direct, 1e-9) << t;
  }
}

TEST(SpectralProperty, DispersionBelowTwoDT) {
  for (const auto& s : {SpaceModel::circle(), SpaceModel::flat_torus(2), SpaceModel::su2()}) {
    for (int i = 0; i < 12; ++i) {
      double t = std::pow(10.0, -4.0 + 4.0 * i / 11.0);
      SpectralValue v = dispersion_integral_detailed(s, t);
      EXPECT_LE(v.value - v.error_bound, 2.0 * s.dim() * t) << s.name() << " t=" << t;
    }
  }
}

TEST(Spectral, ParseNames) {
  EXPECT_EQ(SpaceModel::parse("torus2"), SpaceModel::flat_torus(2));
  EXPECT_EQ(SpaceModel::parse("torus:3"), SpaceModel::flat_torus(3));
  EXPECT_EQ(SpaceModel::parse("SU2"), SpaceModel::su2());
  EXPECT_EQ(SpaceModel::parse("circle"), SpaceModel::circle());
  EXPECT_THROW(SpaceModel::parse("sphere"), Error);
}
