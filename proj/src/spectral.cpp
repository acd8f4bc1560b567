#include "w2lab/spectral.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "w2lab/quadrature.hpp"

namespace w2lab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double su2_radius() { return std::pow(2.0 * kPi * kPi, -1.0 / 3.0); }
double so3_radius() { return std::pow(kPi, -2.0 / 3.0); }

// Irrep series on SU2 (all n >= 2) or SO3 (odd n >= 3).
struct GroupSeries {
  double r2;    // radius squared
  double s;     // t / r^2
  int first;    // first nontrivial irrep dimension
  int step;

  GroupSeries(const SpaceModel& space, double t) {
    double r = space.radius_scale();
    r2 = r * r;
    s = t / r2;
    first = space.kind() == SpaceKind::SU2 ? 2 : 3;
    step = space.kind() == SpaceKind::SU2 ? 1 : 2;
  }
  double lambda(double n) const { return (n * n - 1.0) / r2; }
  double trace_term(double n) const { return n * n * std::exp(-(n * n - 1.0) * s); }
  double inv_term(double n) const { return trace_term(n) / lambda(n); }

  // e^{s} * erfc(a sqrt(s)) without overflow.
  double exp_s_erfc(double a) const {
    double x = a * std::sqrt(s);
    if (x > 5.0) {
      // Upper bound erfc(x) <= e^{-x^2}/(x sqrt(pi)).
      return std::exp(-(a * a - 1.0) * s) / (x * std::sqrt(kPi));
    }
    return std::exp(s) * std::erfc(x);
  }

  // Bound on the sum of inv_term over irreps n >= a (a in the lattice of this series).
  double inv_tail(double a) const {
    double integral = (a * a / (a * a - 1.0)) * r2 * 0.5 * std::sqrt(kPi / s) * exp_s_erfc(a);
    return inv_term(a) + integral / step;
  }

  double trace_tail(double a) const {
    double integral = a * std::exp(-(a * a - 1.0) * s) / (2.0 * s) +
                      std::sqrt(kPi / s) / (4.0 * s) * exp_s_erfc(a);
    double peak = 1.0 / std::sqrt(s);
    double gmax = a >= peak ? trace_term(a) : std::exp(s - 1.0) / s;
    return integral / step + gmax;
  }
};

std::int64_t torus_shells(double cutoff) {
  double r = cutoff / kFourPi2 * (1.0 + 1e-12);
  if (r < 1.0) return 0;
  if (r > 9.0e15) throw Error(ErrorCode::EntryLimit, "torus cutoff too large");
  return static_cast<std::int64_t>(std::floor(r));
}

int irrep_bound(const SpaceModel& space, double cutoff) {
  double r = space.radius_scale();
  double n = std::sqrt(cutoff * r * r + 1.0) * (1.0 + 1e-12);
  if (n > 1.0e9) throw Error(ErrorCode::EntryLimit, "irrep cutoff too large");
  int n_last = static_cast<int>(std::floor(n));
  if (space.kind() == SpaceKind::SO3 && n_last % 2 == 0) --n_last;
  return n_last;
}

// Tail of sum over |k|^2 > R of exp(-a |k|^2) in Z^d given the partial sum including k = 0.
double torus_gaussian_tail(int d, double a, std::int64_t R, double partial_with_zero) {
  double full = std::pow(theta3(a), d);
  double by_difference = std::max(full - partial_with_zero, 0.0) + 16.0 * kEps * full * d;
  double by_halving = std::exp(-0.5 * a * static_cast<double>(R + 1)) * std::pow(theta3(0.5 * a), d);
  return std::min(by_difference, by_halving);
}

}  // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::EntryLimit: return "entry-limit";
    case ErrorCode::CutoffTooSmall: return "cutoff-too-small";
    case ErrorCode::QuadratureNonconvergence: return "quadrature-nonconvergence";
    case ErrorCode::SamplerStall: return "sampler-stall";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::BudgetExceeded: return "budget-exceeded";
    case ErrorCode::DensityViolation: return "density-violation";
    case ErrorCode::NonQualifyingPrime: return "non-qualifying-prime";
    case ErrorCode::Config: return "config";
  }
  return "error";
}

SpaceModel SpaceModel::circle() { return SpaceModel(SpaceKind::Circle, 1, 0.0); }

SpaceModel SpaceModel::flat_torus(int d) {
  if (d < 1 || d > 4) {
    throw Error(ErrorCode::InvalidArgument, "flat torus dimension must be in 1..4");
  }
  return SpaceModel(SpaceKind::FlatTorus, d, 0.0);
}

SpaceModel SpaceModel::su2() { return SpaceModel(SpaceKind::SU2, 3, su2_radius()); }
SpaceModel SpaceModel::so3() { return SpaceModel(SpaceKind::SO3, 3, so3_radius()); }

SpaceModel SpaceModel::parse(const std::string& raw) {
  std::string s;
  for (char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s += static_cast<char>(std::tolower(ch));
  }
  if (s == "circle") return circle();
  if (s == "su2") return su2();
  if (s == "so3") return so3();
  if (s.rfind("torus", 0) == 0) {
    std::string rest = s.substr(5);
    if (!rest.empty() && (rest[0] == ':' || rest[0] == '(')) rest = rest.substr(1);
    if (!rest.empty() && rest.back() == ')') rest.pop_back();
    if (!rest.empty() && std::all_of(rest.begin(), rest.end(), ::isdigit)) {
      return flat_torus(std::stoi(rest));
    }
  }
  throw Error(ErrorCode::Config, "unknown space '" + raw + "'");
}

double SpaceModel::diameter() const {
  switch (kind_) {
    case SpaceKind::Circle:
    case SpaceKind::FlatTorus: return 0.5 * std::sqrt(static_cast<double>(dim_));
    case SpaceKind::SU2: return radius_ * kPi;
    case SpaceKind::SO3: return radius_ * kPi / 2.0;
  }
  return 0.0;
}

std::string SpaceModel::name() const {
  switch (kind_) {
    case SpaceKind::Circle: return "circle";
    case SpaceKind::FlatTorus: return "torus" + std::to_string(dim_);
    case SpaceKind::SU2: return "su2";
    case SpaceKind::SO3: return "so3";
  }
  return "unknown";
}

std::vector<std::int64_t> lattice_counts(int d, std::int64_t n_max) {
  std::vector<std::int64_t> one(static_cast<std::size_t>(n_max + 1), 0);
  std::vector<std::int64_t> squares;
  for (std::int64_t j = 0; j * j <= n_max; ++j) {
    one[static_cast<std::size_t>(j * j)] = j == 0 ? 1 : 2;
    squares.push_back(j * j);
  }
  std::vector<std::int64_t> acc = one;
  for (int dim = 2; dim <= d; ++dim) {
    std::vector<std::int64_t> next(acc.size(), 0);
    for (std::int64_t n = 0; n <= n_max; ++n) {
      std::int64_t c = acc[static_cast<std::size_t>(n)];
      if (c == 0) continue;
      for (std::int64_t sq : squares) {
        if (n + sq > n_max) break;
        next[static_cast<std::size_t>(n + sq)] += c * one[static_cast<std::size_t>(sq)];
      }
    }
    acc.swap(next);
  }
  return acc;
}

SpectrumSlice enumerate_spectrum(const SpaceModel& space, double cutoff,
                                 std::optional<double> tail_time, const SpectrumOptions& opts) {
  if (!(cutoff > 0.0)) throw Error(ErrorCode::InvalidArgument, "cutoff must be positive");
  SpectrumSlice slice;
  slice.cutoff = cutoff;
  if (space.is_torus()) {
    std::int64_t R = torus_shells(cutoff);
    if (static_cast<double>(R) > 4.0 * static_cast<double>(opts.max_entries)) {
      throw Error(ErrorCode::EntryLimit, "spectrum slice would exceed the entry limit");
    }
    auto counts = lattice_counts(space.dim(), R);
    for (std::int64_t n = 1; n <= R; ++n) {
      std::int64_t m = counts[static_cast<std::size_t>(n)];
      if (m > 0) slice.entries.push_back({kFourPi2 * static_cast<double>(n), m, n});
    }
    if (slice.entries.size() > opts.max_entries) {
      throw Error(ErrorCode::EntryLimit, "spectrum slice would exceed the entry limit");
    }
    if (tail_time) {
      double a = kFourPi2 * *tail_time;
      KahanSum partial;
      partial += 1.0;
      for (const auto& e : slice.entries) {
        partial += static_cast<double>(e.multiplicity) * std::exp(-a * static_cast<double>(e.label));
      }
      slice.tail_bound = torus_gaussian_tail(space.dim(), a, R, partial.value()) /
                         (kFourPi2 * static_cast<double>(R + 1));
      slice.tail_time = *tail_time;
    } else {
      slice.tail_bound = std::numeric_limits<double>::quiet_NaN();
    }
    return slice;
  }
  GroupSeries gs(space, tail_time.value_or(1.0));
  int n_last = irrep_bound(space, cutoff);
  std::size_t count = n_last >= gs.first ? static_cast<std::size_t>((n_last - gs.first) / gs.step + 1) : 0;
  if (count > opts.max_entries) {
    throw Error(ErrorCode::EntryLimit, "spectrum slice would exceed the entry limit");
  }
  for (int n = gs.first; n <= n_last; n += gs.step) {
    slice.entries.push_back({gs.lambda(n), static_cast<std::int64_t>(n) * n, n});
  }
  if (tail_time) {
    int n_next = std::max(gs.first, n_last + gs.step);
    if (space.kind() == SpaceKind::SO3 && n_next % 2 == 0) ++n_next;
    slice.tail_bound = gs.inv_tail(n_next);
    slice.tail_time = *tail_time;
  } else {
    slice.tail_bound = std::numeric_limits<double>::quiet_NaN();
  }
  return slice;
}

void validate_point(const SpaceModel& space, const Point& p) {
  if (space.is_torus()) {
    for (int i = 0; i < space.dim(); ++i) {
      if (!std::isfinite(p[i])) throw Error(ErrorCode::InvalidArgument, "non-finite coordinate");
    }
    return;
  }
  double n2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
  if (!(std::abs(std::sqrt(n2) - 1.0) <= 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "quaternion is not unit length");
  }
}

Point canonical_point(const SpaceModel& space, const Point& p) {
  Point q = p;
  if (space.is_torus()) {
    for (int i = 0; i < space.dim(); ++i) {
      double v = q[i] - std::floor(q[i]);
      q[i] = v >= 1.0 ? 0.0 : v;
    }
    for (int i = space.dim(); i < 4; ++i) q[i] = 0.0;
    return q;
  }
  if (space.kind() == SpaceKind::SO3) {
    bool flip = q[0] < 0.0;
    if (q[0] == 0.0) {
      for (int i = 1; i < 4; ++i) {
        if (q[i] != 0.0) {
          flip = q[i] < 0.0;
          break;
        }
      }
    }
    if (flip) {
      for (auto& v : q.c) v = -v;
    }
  }
  return q;
}

double squared_distance(const SpaceModel& space, const Point& x, const Point& y) {
  if (space.is_torus()) {
    double s = 0.0;
    for (int i = 0; i < space.dim(); ++i) {
      double d = std::abs(x[i] - y[i]);
      d -= std::floor(d);
      d = std::min(d, 1.0 - d);
      s += d * d;
    }
    return s;
  }
  double dm = 0.0, dp = 0.0;
  for (int i = 0; i < 4; ++i) {
    double a = x[i] - y[i];
    double b = x[i] + y[i];
    dm += a * a;
    dp += b * b;
  }
  dm = std::sqrt(dm);
  dp = std::sqrt(dp);
  double angle;
  if (space.kind() == SpaceKind::SU2) {
    angle = 2.0 * std::atan2(dm, dp);
  } else {
    angle = 2.0 * std::atan2(std::min(dm, dp), std::max(dm, dp));
  }
  double d = space.radius_scale() * angle;
  return d * d;
}

double geodesic_distance(const SpaceModel& space, const Point& x, const Point& y) {
  return std::sqrt(squared_distance(space, x, y));
}

double theta3(double a) {
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "theta3 needs a > 0");
  KahanSum s;
  if (a >= kPi) {
    s += 1.0;
    for (int n = 1;; ++n) {
      double term = 2.0 * std::exp(-a * n * n);
      s += term;
      if (term < 1e-18) break;
    }
    return s.value();
  }
  // Poisson summation: sqrt(pi/a) * sum_m exp(-pi^2 m^2 / a).
  s += 1.0;
  for (int m = 1;; ++m) {
    double term = 2.0 * std::exp(-kPi * kPi * m * m / a);
    s += term;
    if (term < 1e-18) break;
  }
  return std::sqrt(kPi / a) * s.value();
}

HeatSums heat_sums(const SpaceModel& space, double t, double cutoff, std::optional<double> tolerance) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be positive");
  if (!(cutoff > 0.0)) throw Error(ErrorCode::InvalidArgument, "cutoff must be positive");
  HeatSums out;
  out.cutoff = cutoff;
  if (space.is_torus()) {
    std::int64_t R = torus_shells(cutoff);
    double a = kFourPi2 * t;
    auto counts = lattice_counts(space.dim(), R);
    KahanSum trace, inv, with_zero;
    with_zero += 1.0;
    for (std::int64_t n = 1; n <= R; ++n) {
      auto m = counts[static_cast<std::size_t>(n)];
      if (m == 0) continue;
      double e = static_cast<double>(m) * std::exp(-a * static_cast<double>(n));
      trace += e;
      with_zero += e;
      inv += e / (kFourPi2 * static_cast<double>(n));
    }
    out.trace = trace.value();
    out.inv_sum = inv.value();
    out.trace_tail_bound = torus_gaussian_tail(space.dim(), a, R, with_zero.value());
    out.inv_tail_bound = out.trace_tail_bound / (kFourPi2 * static_cast<double>(R + 1));
  } else {
    GroupSeries gs(space, t);
    int n_last = irrep_bound(space, cutoff);
    KahanSum trace, inv;
    for (int n = gs.first; n <= n_last; n += gs.step) {
      trace += gs.trace_term(n);
      inv += gs.inv_term(n);
    }
    int n_next = std::max(gs.first, n_last + gs.step);
    if (space.kind() == SpaceKind::SO3 && n_next % 2 == 0) ++n_next;
    out.trace = trace.value();
    out.inv_sum = inv.value();
    out.trace_tail_bound = gs.trace_tail(n_next);
    out.inv_tail_bound = gs.inv_tail(n_next);
  }
  if (tolerance && out.inv_tail_bound > *tolerance) {
    std::ostringstream msg;
    msg << "tail bound " << out.inv_tail_bound << " exceeds tolerance " << *tolerance
        << " at cutoff " << cutoff;
    throw Error(ErrorCode::CutoffTooSmall, msg.str());
  }
  return out;
}

namespace {

// Direct lattice sum with the shell count chosen so the tail is relatively negligible.
SpectralValue torus_direct(const SpaceModel& space, double t, double tol, bool trace) {
  double a = kFourPi2 * t;
  double head = std::pow(theta3(0.5 * a), space.dim());
  double target = std::max(tol, 1e-300);
  std::int64_t R = static_cast<std::int64_t>(
      std::ceil(2.0 * std::log(std::max(head / (kFourPi2 * target), 1.0)) / a));
  R = std::max<std::int64_t>(R, 1);
  for (int attempt = 0; attempt < 8; ++attempt) {
    HeatSums hs = heat_sums(space, t, kFourPi2 * static_cast<double>(R));
    double value = trace ? hs.trace : hs.inv_sum;
    double err = trace ? hs.trace_tail_bound : hs.inv_tail_bound;
    if (err <= tol * value || err == 0.0 || value == 0.0) return {value, err};
    R *= 2;
  }
  throw Error(ErrorCode::CutoffTooSmall, "torus direct sum did not reach tolerance");
}

SpectralValue group_sum(const SpaceModel& space, double t, double tol, bool trace) {
  GroupSeries gs(space, t);
  KahanSum acc;
  for (int n = gs.first;; n += gs.step) {
    acc += trace ? gs.trace_term(n) : gs.inv_term(n);
    double value = acc.value();
    if (n > 10 && (n - gs.first) % 8 == 0) {
      double peak = 1.0 / std::sqrt(gs.s);
      if (n >= peak) {
        double tail = trace ? gs.trace_tail(n + gs.step) : gs.inv_tail(n + gs.step);
        if (tail <= tol * value || value == 0.0) return {value, tail};
      }
    }
    if (n > 200'000'000) throw Error(ErrorCode::CutoffTooSmall, "irrep series did not converge");
  }
}

}  // namespace

ThetaHeatSums heat_sums_theta(const SpaceModel& space, double t) {
  if (!space.is_torus()) throw Error(ErrorCode::Unsupported, "theta path needs a torus");
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be positive");
  const int d = space.dim();
  ThetaHeatSums out;
  double full = std::pow(theta3(kFourPi2 * t), d);
  out.trace = {full - 1.0, 8.0 * kEps * full * d};

  const double t1 = 1.0 / kFourPi2;
  if (t >= t1) {
    out.inv_sum = torus_direct(space, t, 1e-15, false);
    return out;
  }
  auto integrand = [d](double s) {
    double u = std::exp(s);
    double a = kFourPi2 * u;
    return (std::pow(theta3(a), d) - 1.0) * u;
  };
  // Scale of the integral from the leading Gaussian term.
  double scale;
  if (d == 2) {
    scale = std::log(t1 / t) / (4.0 * kPi);
  } else {
    double e = 1.0 - 0.5 * d;
    scale = std::abs(std::pow(t1, e) - std::pow(t, e)) / std::abs(e) * std::pow(4.0 * kPi, -0.5 * d);
  }
  double tol = std::max(1e-10 * std::min(1.0, scale), 1e-12 * scale);
  QuadratureResult q = adaptive_simpson(integrand, std::log(t), std::log(t1), tol);
  SpectralValue rest = torus_direct(space, t1, 1e-15, false);
  out.inv_sum = {q.value + rest.value, q.error_estimate + rest.error_bound + 8.0 * kEps * q.value};
  return out;
}

SpectralValue inv_heat_sum(const SpaceModel& space, double t, double tol) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be positive");
  if (space.is_torus()) {
    if (kFourPi2 * t < 1.0) return heat_sums_theta(space, t).inv_sum;
    return torus_direct(space, t, tol, false);
  }
  return group_sum(space, t, tol, false);
}

SpectralValue heat_trace(const SpaceModel& space, double t, double tol) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be positive");
  if (space.is_torus()) {
    if (kFourPi2 * t < 1.0) return heat_sums_theta(space, t).trace;
    return torus_direct(space, t, tol, true);
  }
  return group_sum(space, t, tol, true);
}

namespace {

// Periodic one-dimensional heat kernel density at u.
double circle_kernel(double u, double t) {
  if (t < 0.05) {
    double g = 0.0;
    double norm = 1.0 / std::sqrt(4.0 * kPi * t);
    for (int m = -3; m <= 3; ++m) {
      double x = u - m;
      g += std::exp(-x * x / (4.0 * t));
    }
    return norm * g;
  }
  double s = 1.0;
  for (int n = 1;; ++n) {
    double e = std::exp(-kFourPi2 * n * n * t);
    s += 2.0 * e * std::cos(kTwoPi * n * u);
    if (e < 1e-18) break;
  }
  return s;
}

SpectralValue circle_dispersion_quadrature(double t) {
  auto f = [t](double u) { return u * u * circle_kernel(u, t); };
  double tol = std::min(1e-10, 1e-12 * t);
  double split = 12.0 * std::sqrt(t);
  QuadratureResult q;
  if (split < 0.5) {
    QuadratureResult a = adaptive_simpson(f, 0.0, split, 0.5 * tol);
    QuadratureResult b = adaptive_simpson(f, split, 0.5, 0.5 * tol);
    q.value = a.value + b.value;
    q.error_estimate = a.error_estimate + b.error_estimate;
  } else {
    q = adaptive_simpson(f, 0.0, 0.5, tol);
  }
  return {2.0 * q.value, 2.0 * q.error_estimate};
}

// Alternating irrep series for the group dispersion; the error is the first omitted term.
SpectralValue group_dispersion(const SpaceModel& space, double t) {
  GroupSeries gs(space, t);
  KahanSum acc;
  if (space.kind() == SpaceKind::SU2) {
    acc += gs.r2 * (kPi * kPi / 3.0 - 0.5);
    for (int n = 2;; ++n) {
      double nn = static_cast<double>(n);
      double mag = 8.0 * gs.r2 * nn * nn * std::exp(-(nn * nn - 1.0) * gs.s) /
                   ((nn * nn - 1.0) * (nn * nn - 1.0));
      if (mag < 1e-22 && n > 3) return {std::max(acc.value(), 0.0), mag};
      acc += (n % 2 == 0) ? -mag : mag;
    }
  }
  acc += gs.r2 * (kPi * kPi / 12.0 + 0.5);
  for (int n = 3;; n += 2) {
    double nn = static_cast<double>(n);
    double mag = 2.0 * gs.r2 * nn * (1.0 / ((nn - 1) * (nn - 1)) + 1.0 / ((nn + 1) * (nn + 1))) *
                 std::exp(-(nn * nn - 1.0) * gs.s);
    if (mag < 1e-22 && n > 5) return {std::max(acc.value(), 0.0), mag};
    acc += ((n - 1) / 2) % 2 == 1 ? -mag : mag;
  }
}

}  // namespace

SpectralValue dispersion_integral_detailed(const SpaceModel& space, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be positive");
  if (space.is_torus()) {
    SpectralValue one = circle_dispersion_quadrature(t);
    double d = space.dim();
    return {d * one.value, d * one.error_bound};
  }
  return group_dispersion(space, t);
}

double dispersion_integral(const SpaceModel& space, double t) {
  return dispersion_integral_detailed(space, t).value;
}

}  // namespace w2lab
