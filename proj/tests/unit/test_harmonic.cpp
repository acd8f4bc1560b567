#include <gtest/gtest.h>

#include <cmath>

#include "w2lab/harmonic.hpp"
#include "w2lab/rng.hpp"

using namespace w2lab;

namespace {

Point random_unit(Rng& rng) {
  return quat_normalize(make_point(rng.normal(), rng.normal(), rng.normal(), rng.normal()));
}

}  // namespace

TEST(Fourier, TorusCoefficientsMatchDirectSum) {
  const SpaceModel t2 = SpaceModel::flat_torus(2);
  Rng rng(3, 0);
  std::vector<Point> pts;
  std::vector<double> w;
  for (int i = 0; i < 7; ++i) {
    pts.push_back(make_point(rng.uniform(), rng.uniform()));
    w.push_back(1.0 + i);
  }
  for (double& x : w) x /= 28.0;
  FourierPacket pk = fourier_torus(MeasureSpec::atomic(t2, pts, w), 4);
  for (const auto& k : torus_frequencies(2, 4)) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      s += w[i] * std::polar(1.0, kTwoPi * (k[0] * pts[i][0] + k[1] * pts[i][1]));
    }
    EXPECT_NEAR(std::norm(pk.coeff(k)), std::norm(s), 1e-13);
  }
}

TEST(Fourier, MixtureCoefficientsAreClosedForm) {
  TrigTerm t;
  t.k[0] = 2;
  t.a = 0.4;
  FourierPacket pk = fourier_torus(MeasureSpec::mixture(SpaceModel::circle(), 0.6, {t}), 5);
  EXPECT_TRUE(pk.complete);
  // 0.4 cos(4 pi x) puts 0.2 on k = +-2.
  EXPECT_NEAR(std::abs(pk.coeff({2, 0, 0, 0})), 0.2, 1e-15);
  EXPECT_NEAR(std::abs(pk.coeff({1, 0, 0, 0})), 0.0, 1e-15);
  double shell = 0.0;
  for (const auto& [lam, w] : pk.shell_weights()) {
    if (std::abs(lam - 4.0 * kFourPi2) < 1e-9) shell += w;
    else EXPECT_NEAR(w, 0.0, 1e-15) << lam;
  }
  EXPECT_NEAR(shell, 0.08, 1e-15);
}

TEST(Fourier, FrequencyListIsSymmetric) {
  auto ks = torus_frequencies(2, 3);
  for (const auto& k : ks) {
    Frequency m{-k[0], -k[1], 0, 0};
    EXPECT_NE(std::find(ks.begin(), ks.end(), m), ks.end());
    EXPECT_LE(k[0] * k[0] + k[1] * k[1], 9);
  }
}

TEST(Wigner, HomomorphismUnitarityAndCharacter) {
  Rng rng(5, 0);
  for (int it = 0; it < 10; ++it) {
    Point g = random_unit(rng), h = random_unit(rng);
    for (int n : {1, 2, 3, 6}) {
      Eigen::MatrixXcd Dg = wigner_matrix(g, n), Dh = wigner_matrix(h, n);
      Eigen::MatrixXcd Dgh = wigner_matrix(quat_mul(g, h), n);
      EXPECT_LT((Dg * Dh - Dgh).norm(), 1e-10) << n;
      EXPECT_LT((Dg * Dg.adjoint() - Eigen::MatrixXcd::Identity(n, n)).norm(), 1e-10);
      // chi_n(theta) = sin(n theta) / sin(theta) with w = cos(theta)
      double th = std::acos(std::clamp(g[0], -1.0, 1.0));
      double chi = std::sin(n * th) / std::sin(th);
      EXPECT_NEAR(Dg.trace().real(), chi, 1e-9);
    }
  }
}

TEST(Wigner, HaarAveragesVanish) {
  // Monte Carlo Fourier coefficients of Haar samples shrink like 1/sqrt(N).
  const int N = 4000;
  SampleTrace tr = sample(ProcessSpec::iid(MeasureSpec::uniform(SpaceModel::su2()), N, 8));
  FourierPacket pk = fourier_su2(SpaceModel::su2(), tr.points, 5);
  for (int n = 2; n <= 5; ++n) {
    // E ||mu_N(pi)||_HS^2 = n / N for i.i.d. Haar samples.
    EXPECT_LT(pk.group_coeffs[n].squaredNorm(), 6.0 * n / N) << n;
  }
}

TEST(Lps, GeneratorsAreSymmetricUnitQuaternions) {
  const SpaceModel su2 = SpaceModel::su2();
  for (int p : {5, 13, 17}) {
    MeasureSpec g = lps_generators(p, su2);
    const auto& pts = g.atoms().points;
    ASSERT_EQ(pts.size(), static_cast<std::size_t>(p + 1));
    for (const auto& x : pts) {
      EXPECT_NEAR(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3], 1.0, 1e-12);
      Point inv = quat_conj(x);
      bool found = false;
      for (const auto& y : pts) {
        if (std::abs(y[0] - inv[0]) + std::abs(y[1] - inv[1]) + std::abs(y[2] - inv[2]) + std::abs(y[3] - inv[3]) <
            1e-12) {
          found = true;
        }
      }
      EXPECT_TRUE(found);
    }
    FourierPacket pk = fourier_su2(g, 8);
    EXPECT_LT(hermitian_residual(pk), 1e-12);
  }
  EXPECT_THROW(lps_generators(7, su2), Error);
}

TEST(Lps, SpectralRadiusBelowRamanujanValue) {
  for (int p : {5, 13}) {
    FourierPacket pk = fourier_su2(lps_generators(p, SpaceModel::su2()), 16);
    SpectralRadiusReport rep = spectral_radius_q(pk);
    const double ram = 2.0 * std::sqrt(static_cast<double>(p)) / (p + 1.0);
    EXPECT_LE(rep.q_at_cutoff, ram + 1e-9);
    ASSERT_TRUE(rep.closed_form.has_value());
    EXPECT_NEAR(*rep.closed_form, ram, 1e-15);
  }
}

TEST(Convolution, PowerMatchesProductMeasure) {
  const SpaceModel su2 = SpaceModel::su2();
  MeasureSpec g = lps_generators(5, su2);
  const auto& pts = g.atoms().points;
  std::vector<Point> prod;
  for (const auto& a : pts) {
    for (const auto& b : pts) prod.push_back(quat_mul(a, b));
  }
  FourierPacket direct = fourier_su2(su2, prod, 6);
  FourierPacket pow2 = convolution_power(fourier_su2(g, 6), 2);
  for (int n = 2; n <= 6; ++n) EXPECT_LT((direct.group_coeffs[n] - pow2.group_coeffs[n]).norm(), 1e-12) << n;
}

TEST(Convolution, DifferenceWithSelfIsZero) {
  FourierPacket pk = fourier_su2(lps_generators(5, SpaceModel::su2()), 6);
  FourierPacket d = packet_difference(pk, pk);
  for (const auto& [lam, w] : d.shell_weights()) EXPECT_EQ(w, 0.0);
}

TEST(Fourier, CentralMixtureCoefficients) {
  const SpaceModel su2 = SpaceModel::su2();
  MeasureSpec m = MeasureSpec::central_mixture(su2, 0.4, {CentralTerm{2, 0.3}});
  FourierPacket pk = fourier_group(m, 4);
  EXPECT_TRUE(pk.complete);
  Eigen::MatrixXcd expect = (0.3 / 2.0) * Eigen::MatrixXcd::Identity(2, 2);
  EXPECT_LT((pk.group_coeffs[2] - expect).norm(), 1e-15);
  EXPECT_LT(pk.group_coeffs[3].norm(), 1e-15);
}
