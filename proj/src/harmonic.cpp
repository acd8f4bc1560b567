#include "w2lab/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace w2lab {

namespace {

std::int64_t norm2(const Frequency& k) {
  std::int64_t s = 0;
  for (int v : k) s += static_cast<std::int64_t>(v) * v;
  return s;
}

Frequency negate(Frequency k) {
  for (auto& v : k) v = -v;
  return k;
}

// log of the binomial coefficient C(m, k)
double log_binom(int m, int k) {
  return std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
}

std::vector<Complex> poly_mul(const std::vector<Complex>& p, const std::vector<Complex>& q) {
  std::vector<Complex> r(p.size() + q.size() - 1, Complex(0.0));
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  }
  return r;
}

void require_group(const SpaceModel& space) {
  if (!space.is_group()) throw Error(ErrorCode::Unsupported, "irrep data needs SU2 or SO3");
}

FourierPacket empty_group_packet(const SpaceModel& space, int n_max) {
  FourierPacket pk;
  pk.space = space;
  pk.cutoff = n_max;
  pk.group_coeffs.resize(static_cast<std::size_t>(n_max + 1));
  for (int n = 2; n <= n_max; ++n) {
    pk.group_coeffs[static_cast<std::size_t>(n)] = Eigen::MatrixXcd::Zero(n, n);
  }
  return pk;
}

bool carries_mass(const SpaceModel& space, int n) {
  return space.kind() == SpaceKind::SU2 || n % 2 == 1;
}

}  // namespace

Complex FourierPacket::coeff(const Frequency& k) const {
  auto it = torus_coeffs.find(k);
  return it == torus_coeffs.end() ? Complex(0.0) : it->second;
}

std::vector<std::pair<double, double>> FourierPacket::shell_weights() const {
  std::vector<std::pair<double, double>> out;
  if (space.is_torus()) {
    for (const auto& [k, c] : torus_coeffs) {
      out.emplace_back(kFourPi2 * static_cast<double>(norm2(k)), std::norm(c));
    }
    return out;
  }
  double r = space.radius_scale();
  for (int n = 2; n < static_cast<int>(group_coeffs.size()); ++n) {
    if (!carries_mass(space, n)) continue;
    const auto& m = group_coeffs[static_cast<std::size_t>(n)];
    out.emplace_back((n * n - 1.0) / (r * r), n * m.squaredNorm());
  }
  return out;
}

std::vector<Frequency> torus_frequencies(int d, int K) {
  std::vector<Frequency> out;
  if (K <= 0) return out;
  Frequency k{};
  const std::int64_t K2 = static_cast<std::int64_t>(K) * K;
  std::function<void(int)> rec = [&](int dim) {
    if (dim == d) {
      std::int64_t n = norm2(k);
      if (n > 0 && n <= K2) out.push_back(k);
      return;
    }
    for (int v = -K; v <= K; ++v) {
      k[dim] = v;
      rec(dim + 1);
    }
    k[dim] = 0;
  };
  rec(0);
  return out;
}

FourierPacket fourier_torus(const SpaceModel& space, const std::vector<Point>& points, int K) {
  if (!space.is_torus()) throw Error(ErrorCode::Unsupported, "fourier_torus needs a torus");
  std::vector<double> w(points.size(), 1.0 / static_cast<double>(points.size()));
  MeasureSpec m(space, Atomic{points, w, 0});
  return fourier_torus(m, K);
}

FourierPacket fourier_torus(const MeasureSpec& measure, int K) {
  const SpaceModel& space = measure.space();
  if (!space.is_torus()) throw Error(ErrorCode::Unsupported, "fourier_torus needs a torus");
  const int d = space.dim();
  FourierPacket pk;
  pk.space = space;
  pk.cutoff = K;
  auto freqs = torus_frequencies(d, K);
  for (const auto& k : freqs) pk.torus_coeffs[k] = Complex(0.0);
  const auto& body = measure.body();
  const std::int64_t K2 = static_cast<std::int64_t>(K) * K;

  if (std::holds_alternative<Uniform>(body)) {
    pk.complete = true;
  } else if (const auto* mix = std::get_if<MixtureDensity>(&body)) {
    pk.complete = true;
    for (const auto& t : mix->terms) {
      if (norm2(t.k) > K2) {
        pk.complete = false;
        continue;
      }
      pk.torus_coeffs[t.k] += Complex(0.5 * t.a, -0.5 * t.b);
      pk.torus_coeffs[negate(t.k)] += Complex(0.5 * t.a, 0.5 * t.b);
    }
  } else if (const auto* at = std::get_if<Atomic>(&body)) {
    // Per-atom tables of exp(-2 pi i k x_j) for k in [-K, K].
    const std::size_t width = static_cast<std::size_t>(2 * K + 1);
    std::vector<Complex> table(static_cast<std::size_t>(d) * width);
    std::vector<KahanSum> re(freqs.size()), im(freqs.size());
    for (std::size_t j = 0; j < at->points.size(); ++j) {
      const Point& x = at->points[j];
      for (int i = 0; i < d; ++i) {
        Complex* row = &table[static_cast<std::size_t>(i) * width];
        row[K] = 1.0;
        for (int v = 1; v <= K; ++v) {
          row[K + v] = std::polar(1.0, -kTwoPi * v * x[i]);
          row[K - v] = std::conj(row[K + v]);
        }
      }
      double wj = at->weights[j];
      for (std::size_t f = 0; f < freqs.size(); ++f) {
        Complex e(1.0);
        for (int i = 0; i < d; ++i) e *= table[static_cast<std::size_t>(i) * width + freqs[f][i] + K];
        re[f] += wj * e.real();
        im[f] += wj * e.imag();
      }
    }
    for (std::size_t f = 0; f < freqs.size(); ++f) {
      pk.torus_coeffs[freqs[f]] = Complex(re[f].value(), im[f].value());
    }
  } else {
    const auto& is = std::get<Islands>(body);
    for (const auto& k : freqs) {
      Complex total(0.0);
      for (std::size_t b = 0; b < is.boxes.size(); ++b) {
        const Box& box = is.boxes[b];
        Complex prod(1.0);
        double vol = 1.0;
        for (int i = 0; i < d; ++i) {
          double lo = box.lo[i], hi = box.hi[i];
          vol *= hi - lo;
          if (k[i] == 0) {
            prod *= hi - lo;
          } else {
            double w = kTwoPi * k[i];
            prod *= (std::polar(1.0, -w * hi) - std::polar(1.0, -w * lo)) / Complex(0.0, -w);
          }
        }
        total += prod * (is.masses[b] / vol);
      }
      pk.torus_coeffs[k] = total;
    }
  }
  return pk;
}

Eigen::Matrix2cd su2_matrix(const Point& g) {
  Eigen::Matrix2cd u;
  u << Complex(g[0], g[1]), Complex(g[2], g[3]), Complex(-g[2], g[3]), Complex(g[0], -g[1]);
  return u;
}

Eigen::MatrixXcd wigner_matrix(const Point& g, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "irrep dimension must be at least 1");
  const int m = n - 1;
  Eigen::Matrix2cd u = su2_matrix(g);
  // Powers of (u11 + u21 s) and (u12 + u22 s).
  std::vector<std::vector<Complex>> A(static_cast<std::size_t>(m + 1)), B(static_cast<std::size_t>(m + 1));
  A[0] = {Complex(1.0)};
  B[0] = {Complex(1.0)};
  std::vector<Complex> a1 = {u(0, 0), u(1, 0)};
  std::vector<Complex> b1 = {u(0, 1), u(1, 1)};
  for (int i = 1; i <= m; ++i) {
    A[static_cast<std::size_t>(i)] = poly_mul(A[static_cast<std::size_t>(i - 1)], a1);
    B[static_cast<std::size_t>(i)] = poly_mul(B[static_cast<std::size_t>(i - 1)], b1);
  }
  std::vector<double> lb(static_cast<std::size_t>(m + 1));
  for (int k = 0; k <= m; ++k) lb[static_cast<std::size_t>(k)] = log_binom(m, k);
  Eigen::MatrixXcd D(n, n);
  for (int k = 0; k <= m; ++k) {
    auto col = poly_mul(A[static_cast<std::size_t>(m - k)], B[static_cast<std::size_t>(k)]);
    for (int j = 0; j <= m; ++j) {
      double scale = std::exp(0.5 * (lb[static_cast<std::size_t>(k)] - lb[static_cast<std::size_t>(j)]));
      D(j, k) = col[static_cast<std::size_t>(j)] * scale;
    }
  }
  return D;
}

FourierPacket fourier_su2(const SpaceModel& space, const std::vector<Point>& points, int n_max) {
  std::vector<double> w(points.size(), 1.0 / static_cast<double>(points.size()));
  MeasureSpec m(space, Atomic{points, w, 0});
  return fourier_su2(m, n_max);
}

FourierPacket fourier_su2(const MeasureSpec& measure, int n_max) {
  const SpaceModel& space = measure.space();
  require_group(space);
  if (!measure.is_atomic()) return fourier_group(measure, n_max);
  const auto& at = measure.atoms();
  FourierPacket pk = empty_group_packet(space, n_max);
  if (at.lps_prime > 0) pk.lps_prime = at.lps_prime;
  for (int n = 2; n <= n_max; ++n) {
    if (!carries_mass(space, n)) continue;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t j = 0; j < at.points.size(); ++j) {
      acc += at.weights[j] * wigner_matrix(at.points[j], n).adjoint();
    }
    pk.group_coeffs[static_cast<std::size_t>(n)] = acc;
  }
  return pk;
}

FourierPacket fourier_group(const MeasureSpec& measure, int n_max) {
  const SpaceModel& space = measure.space();
  require_group(space);
  FourierPacket pk = empty_group_packet(space, n_max);
  pk.complete = true;
  if (const auto* mix = std::get_if<MixtureDensity>(&measure.body())) {
    for (const auto& t : mix->central) {
      if (t.n > n_max) {
        pk.complete = false;
        continue;
      }
      pk.group_coeffs[static_cast<std::size_t>(t.n)] +=
          Eigen::MatrixXcd::Identity(t.n, t.n) * (t.a / t.n);
    }
  } else if (measure.is_atomic()) {
    return fourier_su2(measure, n_max);
  } else if (!measure.is_uniform()) {
    throw Error(ErrorCode::Unsupported, "no Fourier data for this measure on a group");
  }
  return pk;
}

FourierPacket packet_difference(const FourierPacket& a, const FourierPacket& b) {
  if (!(a.space == b.space) || a.cutoff != b.cutoff) {
    throw Error(ErrorCode::InvalidArgument, "packets differ in space or cutoff");
  }
  FourierPacket out = a;
  out.complete = a.complete && b.complete;
  out.lps_prime.reset();
  if (a.space.is_torus()) {
    for (auto& [k, c] : out.torus_coeffs) c -= b.coeff(k);
  } else {
    for (std::size_t n = 2; n < out.group_coeffs.size(); ++n) {
      out.group_coeffs[n] -= b.group_coeffs[n];
    }
  }
  return out;
}

SpectralRadiusReport spectral_radius_q(const FourierPacket& packet) {
  SpectralRadiusReport rep;
  rep.cutoff = packet.cutoff;
  if (packet.space.is_torus()) {
    // Ties go to the smaller |k|^2, then lexicographic order.
    std::vector<std::pair<Frequency, Complex>> items(packet.torus_coeffs.begin(),
                                                     packet.torus_coeffs.end());
    std::stable_sort(items.begin(), items.end(), [](const auto& x, const auto& y) {
      return norm2(x.first) < norm2(y.first);
    });
    double best = -1.0;
    for (const auto& [k, c] : items) {
      double v = std::abs(c);
      if (v > best) {
        best = v;
        rep.attaining_frequency = k;
      }
    }
    rep.q_at_cutoff = std::max(best, 0.0);
    rep.is_exact = packet.complete;
  } else {
    rep.per_irrep.assign(packet.group_coeffs.size(), 0.0);
    double best = -1.0;
    for (int n = 2; n < static_cast<int>(packet.group_coeffs.size()); ++n) {
      if (!carries_mass(packet.space, n)) continue;
      const auto& m = packet.group_coeffs[static_cast<std::size_t>(n)];
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
      double s = svd.singularValues()(0);
      rep.per_irrep[static_cast<std::size_t>(n)] = s;
      if (s > best) {
        best = s;
        rep.attaining_irrep = n;
      }
    }
    rep.q_at_cutoff = std::max(best, 0.0);
    rep.is_exact = packet.complete;
    if (packet.lps_prime) {
      int p = *packet.lps_prime;
      rep.closed_form = 2.0 * std::sqrt(static_cast<double>(p)) / (p + 1.0);
      rep.is_exact = true;
    }
  }
  std::ostringstream cav;
  if (packet.complete) {
    cav << "all nonzero coefficients lie inside the cutoff";
  } else if (rep.closed_form) {
    cav << "computed up to cutoff " << packet.cutoff << "; closed form " << *rep.closed_form
        << " holds for the full supremum";
  } else {
    cav << "supremum taken up to cutoff " << packet.cutoff << " only";
  }
  rep.caveat = cav.str();
  return rep;
}

FourierPacket convolution_power(const FourierPacket& packet, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "convolution power needs n >= 1");
  FourierPacket out = packet;
  if (packet.space.is_torus()) {
    for (auto& [k, c] : out.torus_coeffs) {
      Complex r(1.0), b = c;
      for (int e = n; e > 0; e >>= 1) {
        if (e & 1) r *= b;
        b *= b;
      }
      c = r;
    }
    return out;
  }
  for (std::size_t d = 2; d < out.group_coeffs.size(); ++d) {
    const auto& m = packet.group_coeffs[d];
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    Eigen::MatrixXcd b = m;
    for (int e = n; e > 0; e >>= 1) {
      if (e & 1) r = r * b;
      if (e > 1) b = b * b;
    }
    out.group_coeffs[d] = r;
  }
  out.lps_prime.reset();
  return out;
}

bool is_prime(long long n) {
  if (n < 2) return false;
  for (long long d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

MeasureSpec lps_generators(int p, const SpaceModel& target) {
  require_group(target);
  if (!is_prime(p) || p % 4 != 1) {
    throw Error(ErrorCode::NonQualifyingPrime,
                std::to_string(p) + " is not a prime congruent to 1 mod 4");
  }
  int r = static_cast<int>(std::floor(std::sqrt(static_cast<double>(p))));
  std::vector<Point> pts;
  double s = std::sqrt(static_cast<double>(p));
  for (int a = 1; a <= r; a += 2) {
    for (int b = -r; b <= r; ++b) {
      for (int c = -r; c <= r; ++c) {
        for (int d = -r; d <= r; ++d) {
          if (a * a + b * b + c * c + d * d == p) pts.push_back(make_point(a / s, b / s, c / s, d / s));
        }
      }
    }
  }
  if (static_cast<int>(pts.size()) != p + 1) {
    throw Error(ErrorCode::NonQualifyingPrime, "unexpected generator count for p = " + std::to_string(p));
  }
  std::vector<double> w(pts.size(), 1.0 / static_cast<double>(pts.size()));
  MeasureSpec m = MeasureSpec::atomic(target, pts, w);
  Atomic at = m.atoms();
  at.lps_prime = p;
  return MeasureSpec(target, at);
}

double hermitian_residual(const FourierPacket& packet) {
  double worst = 0.0;
  if (packet.space.is_torus()) {
    for (const auto& [k, c] : packet.torus_coeffs) worst = std::max(worst, std::abs(c.imag()));
    return worst;
  }
  for (std::size_t n = 2; n < packet.group_coeffs.size(); ++n) {
    const auto& m = packet.group_coeffs[n];
    if (m.size() == 0) continue;
    worst = std::max(worst, (m - m.adjoint()).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace w2lab
