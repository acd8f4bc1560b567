#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "w2lab/measures.hpp"

namespace w2lab {

using Complex = std::complex<double>;
using Frequency = std::array<int, 4>;

struct FourierPacket {
  SpaceModel space = SpaceModel::circle();
  // Tori: Euclidean frequency radius K. Groups: largest irrep dimension.
  int cutoff = 0;
  std::map<Frequency, Complex> torus_coeffs;
  // Index n holds the n x n matrix; entries 0 and 1 are unused.
  std::vector<Eigen::MatrixXcd> group_coeffs;
  // True when every nonzero coefficient of the measure lies inside the cutoff.
  bool complete = false;
  std::optional<int> lps_prime;

  Complex coeff(const Frequency& k) const;
  // |nu(k)|^2 on tori, d ||nu(pi)||_HS^2 on groups, summed by eigenvalue shell.
  std::vector<std::pair<double, double>> shell_weights() const;
};

// Frequencies 0 < |k| <= K in lexicographic order (both k and -k).
std::vector<Frequency> torus_frequencies(int d, int K);

FourierPacket fourier_torus(const MeasureSpec& measure, int K);
FourierPacket fourier_torus(const SpaceModel& space, const std::vector<Point>& points, int K);

// dimension-n irrep on homogeneous polynomials of degree n-1.
Eigen::MatrixXcd wigner_matrix(const Point& g, int n);
// SU(2) matrix [[w + ix, y + iz], [-y + iz, w - ix]].
Eigen::Matrix2cd su2_matrix(const Point& g);

FourierPacket fourier_su2(const MeasureSpec& measure, int n_max);
FourierPacket fourier_su2(const SpaceModel& space, const std::vector<Point>& points, int n_max);
// Fourier data of a class-function mixture on SU2/SO3: (a_n / n) I.
FourierPacket fourier_group(const MeasureSpec& measure, int n_max);

// mu - nu, both on the same space and cutoff.
FourierPacket packet_difference(const FourierPacket& a, const FourierPacket& b);

struct SpectralRadiusReport {
  double q_at_cutoff = 0.0;
  // Frequency (tori) or irrep dimension (groups) attaining the maximum.
  Frequency attaining_frequency{};
  int attaining_irrep = 0;
  int cutoff = 0;
  bool is_exact = false;
  // Closed-form value when one is documented (Ramanujan sets).
  std::optional<double> closed_form;
  std::vector<double> per_irrep;
  std::string caveat;
};

SpectralRadiusReport spectral_radius_q(const FourierPacket& packet);
FourierPacket convolution_power(const FourierPacket& packet, int n);

// The p + 1 unit quaternions from integer quaternions of norm p with odd positive first
// coordinate, equal weights.
MeasureSpec lps_generators(int p, const SpaceModel& target);
bool is_prime(long long n);

// Largest residual of D - D^dagger over the packet.
double hermitian_residual(const FourierPacket& packet);

}  // namespace w2lab
