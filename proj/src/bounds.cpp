#include "w2lab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "w2lab/quadrature.hpp"
#include "w2lab/spectral.hpp"

namespace w2lab {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_positive(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be positive and finite");
  }
}

// Eigenvalue cutoff covering exactly the frequencies or irreps stored in a packet.
double packet_eigen_cutoff(const FourierPacket& pk) {
  if (pk.space.is_torus()) {
    return kFourPi2 * (static_cast<double>(pk.cutoff) * pk.cutoff + 0.5);
  }
  double r = pk.space.radius_scale();
  double n = pk.cutoff + 0.5;
  return (n * n - 1.0) / (r * r);
}

double shell_sum(const FourierPacket& pk, double t) {
  KahanSum s;
  for (const auto& [lam, w] : pk.shell_weights()) s += std::exp(-lam * t) / lam * w;
  return s.value();
}

FourierPacket packet_of(const MeasureSpec& m, int cutoff) {
  if (m.space().is_torus()) return fourier_torus(m, cutoff);
  return fourier_group(m, cutoff);
}

double full_inv_sum(const SpaceModel& space, double t) { return inv_heat_sum(space, t).upper(); }

}  // namespace

double BoundReport::component(const std::string& name) const {
  for (const auto& c : components) {
    if (c.name == name) return c.value;
  }
  throw Error(ErrorCode::InvalidArgument, "no component named " + name);
}

bool BoundReport::has_component(const std::string& name) const {
  return std::any_of(components.begin(), components.end(), [&](const auto& c) { return c.name == name; });
}

OptimizeResult optimize_t(const std::function<double(double)>& evaluator, double t_lo, double t_hi,
                          int grid_points, double rel_tol) {
  require_positive(t_lo, "t_lo");
  if (!(t_hi > t_lo)) throw Error(ErrorCode::InvalidArgument, "empty t range");
  if (grid_points < 3) throw Error(ErrorCode::InvalidArgument, "optimize_t needs at least 3 grid points");
  OptimizeResult res;
  const double a0 = std::log(t_lo), b0 = std::log(t_hi);
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    double s = a0 + (b0 - a0) * i / (grid_points - 1);
    double t = std::exp(s);
    double v = evaluator(t);
    res.grid.emplace_back(t, v);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  res.at_boundary = best == 0 || best == grid_points - 1;
  double a = std::log(res.grid[static_cast<std::size_t>(std::max(best - 1, 0))].first);
  double b = std::log(res.grid[static_cast<std::size_t>(std::min(best + 1, grid_points - 1))].first);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = evaluator(std::exp(c)), fd = evaluator(std::exp(d));
  // rel_tol on t is an absolute tolerance on log t.
  while (b - a > rel_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = evaluator(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = evaluator(std::exp(d));
    }
  }
  double ts = std::exp(0.5 * (a + b));
  double vs = evaluator(ts);
  if (vs <= best_v) {
    res.t_star = ts;
    res.value = vs;
  } else {
    res.t_star = res.grid[static_cast<std::size_t>(best)].first;
    res.value = best_v;
  }
  return res;
}

BoundReport smoothing_rhs(const MeasureSpec& mu, const FourierPacket& coeff_diff, double t,
                          std::optional<double> tail_tolerance) {
  require_positive(t, "t");
  const SpaceModel& space = mu.space();
  if (!(coeff_diff.space == space)) throw Error(ErrorCode::InvalidArgument, "packet lives on another space");
  double c = lower_mass_constant(mu);
  if (!(c > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "smoothing bound needs a positive lower density constant c for mu");
  }
  const double c1 = 1.0 + std::sqrt(1.0 - c);
  const double c2 = std::sqrt(c);
  const double S = shell_sum(coeff_diff, t);
  double tail = 0.0;
  if (!coeff_diff.complete) {
    tail = 4.0 * heat_sums(space, t, packet_eigen_cutoff(coeff_diff)).inv_tail_bound;
  }
  if (tail_tolerance && tail > *tail_tolerance) {
    std::ostringstream msg;
    msg << "certified tail " << tail << " exceeds tolerance " << *tail_tolerance;
    throw Error(ErrorCode::CutoffTooSmall, msg.str());
  }
  BoundReport rep;
  rep.formula_id = "smoothing-inequality";
  const double smooth = c1 * std::sqrt(space.dim() * t);
  const double spectral = 2.0 / c2 * std::sqrt(S + tail);
  rep.value = smooth + spectral;
  rep.t_star = t;
  rep.components = {{"smoothing_term", smooth}, {"spectral_term", spectral}, {"spectral_sum", S},
                    {"tail_bound", tail},       {"c1", c1},                  {"c2", c2}};
  rep.inputs = {{"space", space.name()}, {"mu", mu.describe()}, {"t", fmt(t)},
                {"cutoff", std::to_string(coeff_diff.cutoff)}};
  return rep;
}

BoundReport smoothing_rhs(const MeasureSpec& mu, const MeasureSpec& nu, double t, double tail_tolerance) {
  require_positive(t, "t");
  const SpaceModel& space = mu.space();
  if (!(nu.space() == space)) throw Error(ErrorCode::InvalidArgument, "measures live on different spaces");
  int cutoff = 2;
  int cap;
  if (space.is_torus()) {
    // Keep the frequency box at a few million entries.
    cap = std::max(2, static_cast<int>(0.5 * (std::pow(2.0e6, 1.0 / space.dim()) - 1.0)));
  } else {
    cap = 64;
  }
  std::vector<std::string> warnings;
  for (;;) {
    FourierPacket probe;
    probe.space = space;
    probe.cutoff = cutoff;
    double tail = 4.0 * heat_sums(space, t, packet_eigen_cutoff(probe)).inv_tail_bound;
    if (tail <= tail_tolerance) break;
    if (cutoff >= cap) {
      warnings.push_back("cutoff capped at " + std::to_string(cap) + "; certified tail included");
      break;
    }
    cutoff = std::min(cap, cutoff * 2);
  }
  FourierPacket diff = packet_difference(packet_of(nu, cutoff), packet_of(mu, cutoff));
  BoundReport rep = smoothing_rhs(mu, diff, t);
  rep.warnings = warnings;
  rep.inputs.emplace_back("nu", nu.describe());
  return rep;
}

BoundReport mean_square_bound(const ProcessSpec& process, std::int64_t N, double t) {
  require_positive(t, "t");
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be positive");
  const SpaceModel& space = process.space();
  MeasureSpec mu = process.stationary();
  if (!mu.is_uniform() && !std::holds_alternative<MixtureDensity>(mu.body())) {
    throw Error(ErrorCode::Unsupported, "mean-square bound needs a uniform or mixture stationary law");
  }
  MixingBudget mb = mixing_budget(process, N);
  if (!(mb.c > 0.0)) throw Error(ErrorCode::InvalidArgument, "stationary law needs c > 0");
  const double c1 = 1.0 + std::sqrt(1.0 - mb.c);
  const double c2 = std::sqrt(mb.c);
  const double inv = full_inv_sum(space, t);

  // E = inv_sum - sum e^{-lambda t}/lambda |mu(k)|^2, exact for trigonometric mixtures.
  double correction = 0.0;
  if (const auto* mix = std::get_if<MixtureDensity>(&mu.body())) {
    int cutoff = 1;
    if (space.is_torus()) {
      for (const auto& term : mix->terms) {
        double r = 0.0;
        for (int i = 0; i < space.dim(); ++i) r += static_cast<double>(term.k[i]) * term.k[i];
        cutoff = std::max(cutoff, static_cast<int>(std::ceil(std::sqrt(r))));
      }
    } else {
      for (const auto& term : mix->central) cutoff = std::max(cutoff, term.n);
    }
    correction = shell_sum(packet_of(mu, cutoff), t);
  }
  const double E = std::max(inv - correction, 0.0);

  // The kernel sum e^{-lambda t}/lambda phi(x)phi(y) is positive definite and constant on
  // the diagonal of a homogeneous space, so its sup is inv_sum.
  const double beta_cross = 4.0 * mb.B_beta * inv;
  double cross = beta_cross;
  std::string branch = "beta";
  if (space.is_torus()) {
    // sup |phi_k|^2 = 2 for the real Fourier basis.
    double alpha_cross = 16.0 * mb.B_alpha * inv;
    if (alpha_cross < cross) {
      cross = alpha_cross;
      branch = "alpha";
    }
  }
  const double Nd = static_cast<double>(N);
  const double smooth = c1 * std::sqrt(space.dim() * t);
  const double spectral = 2.0 / c2 * std::sqrt((E + cross) / Nd);

  BoundReport rep;
  rep.formula_id = "weakly-dependent-mean-square";
  rep.value = smooth + spectral;
  rep.t_star = t;
  rep.components = {{"smoothing_term", smooth}, {"spectral_term", spectral}, {"E", E},
                    {"cross_term", cross},      {"inv_sum", inv},            {"B_beta", mb.B_beta},
                    {"B_alpha", mb.B_alpha},    {"c", mb.c}};
  rep.inputs = {{"process", process.describe()}, {"N", std::to_string(N)}, {"t", fmt(t)},
                {"mixing_branch", branch}};
  return rep;
}

BoundReport mean_square_optimized(const ProcessSpec& process, std::int64_t N, double t_lo, double t_hi) {
  auto f = [&](double t) { return mean_square_bound(process, N, t).value; };
  OptimizeResult opt = optimize_t(f, t_lo, t_hi);
  BoundReport rep = mean_square_bound(process, N, opt.t_star);
  rep.audit_grid = opt.grid;
  if (opt.at_boundary) rep.warnings.push_back("optimum at the boundary of the t range");
  return rep;
}

double circle_bound(double c, double B, std::int64_t N) {
  if (!(c > 0.0) || B < 0.0 || N < 1) throw Error(ErrorCode::InvalidArgument, "circle bound needs c > 0, B >= 0, N >= 1");
  return std::sqrt((2.0 + 16.0 * B) / (3.0 * c * static_cast<double>(N)));
}

double gauss_circle_tau() {
  return std::exp(-kFourPi2) / (16.0 * kPi * kPi * kPi) +
         (3.0 * kPi * std::sqrt(2.0) + 2.5 * kPi - 3.0) / kFourPi2;
}

double torus2_constant_audit() { return std::sqrt(2.0) + 2.0 * std::sqrt(gauss_circle_tau()); }

BoundReport q_w2_numeric(double q, const SpaceModel& space) {
  if (!(q >= 0.0) || q > 1.0) throw Error(ErrorCode::InvalidArgument, "q must lie in [0, 1]");
  const int d = space.dim();
  BoundReport rep;
  rep.formula_id = "spectral-radius-numeric";
  rep.inputs = {{"q", fmt(q)}, {"space", space.name()}};
  if (q == 0.0) {
    rep.value = 0.0;
    rep.components = {{"smoothing_term", 0.0}, {"spectral_term", 0.0}};
    return rep;
  }
  auto f = [&](double t) { return std::sqrt(d * t) + 2.0 * q * std::sqrt(full_inv_sum(space, t)); };
  // On the circle the sum stays bounded as t -> 0, so the floor has to sit well below q^2.
  OptimizeResult opt = optimize_t(f, d == 1 ? 1e-12 * std::min(1.0, q * q) : 1e-12, 10.0);
  const double inv = full_inv_sum(space, opt.t_star);
  rep.value = opt.value;
  rep.t_star = opt.t_star;
  rep.audit_grid = opt.grid;
  rep.components = {{"smoothing_term", std::sqrt(d * opt.t_star)},
                    {"spectral_term", 2.0 * q * std::sqrt(inv)},
                    {"spectral_sum", q * q * inv},
                    {"inv_sum", inv}};
  if (d >= 3) {
    double lead = std::pow(8.0 / (d * (d - 2.0)), 1.0 / d) * std::sqrt(d / kPi) * std::pow(q, 2.0 / d);
    rep.components.push_back({"leading_term", lead});
  }
  if (opt.at_boundary) rep.warnings.push_back("optimum at the boundary of the t range");
  return rep;
}

BoundReport q_w2_bound(double q, const SpaceModel& space) {
  if (!(q >= 0.0) || q > 1.0) throw Error(ErrorCode::InvalidArgument, "q must lie in [0, 1]");
  if (space.is_torus() && space.dim() == 1) {
    BoundReport rep;
    rep.formula_id = "spectral-radius-circle";
    rep.value = q / std::sqrt(3.0);
    rep.inputs = {{"q", fmt(q)}, {"space", space.name()}};
    rep.components = {{"closed_form", rep.value}};
    return rep;
  }
  if (space.is_torus() && space.dim() == 2) {
    BoundReport rep;
    rep.formula_id = "spectral-radius-torus2";
    double lg = q > 0.0 ? std::sqrt(2.0 / kPi * std::log(1.0 / q)) : 0.0;
    rep.value = q * lg + 3.0 * q;
    rep.inputs = {{"q", fmt(q)}, {"space", space.name()}};
    rep.components = {{"closed_form", rep.value},
                      {"tau", gauss_circle_tau()},
                      {"constant_audit", torus2_constant_audit()}};
    return rep;
  }
  return q_w2_numeric(q, space);
}

BoundReport rw_empirical_bound(double B, std::int64_t N, const SpaceModel& space) {
  if (B < 0.0 || N < 1) throw Error(ErrorCode::InvalidArgument, "walk bound needs B >= 0, N >= 1");
  const double Nd = static_cast<double>(N);
  const double s = std::sqrt(1.0 + 2.0 * B);
  BoundReport rep;
  rep.inputs = {{"B", fmt(B)}, {"N", std::to_string(N)}, {"space", space.name()}};
  if (space.is_torus() && space.dim() == 1) {
    rep.formula_id = "walk-empirical-circle";
    rep.value = s / std::sqrt(3.0 * Nd);
    rep.components = {{"closed_form", rep.value}};
    return rep;
  }
  if (space.is_torus() && space.dim() == 2) {
    rep.formula_id = "walk-empirical-torus2";
    rep.value = s / std::sqrt(kPi) * std::sqrt(std::log(Nd) / Nd) + 3.0 * s / std::sqrt(Nd);
    rep.components = {{"closed_form", rep.value}};
    return rep;
  }
  const double q_eff = s / std::sqrt(Nd);
  if (q_eff > 1.0) {
    rep.formula_id = "walk-empirical-numeric";
    rep.value = space.diameter();
    rep.components = {{"diameter", rep.value}};
    rep.warnings.push_back("effective q exceeds 1; trivial diameter bound returned");
    return rep;
  }
  BoundReport inner = q_w2_numeric(q_eff, space);
  inner.formula_id = "walk-empirical-numeric";
  inner.inputs = rep.inputs;
  inner.components.push_back({"q_effective", q_eff});
  return inner;
}

double walk_budget(double p) {
  if (!(p >= 0.0) || !(p < 1.0)) throw Error(ErrorCode::InvalidArgument, "walk budget needs 0 <= p < 1");
  return p / (1.0 - p);
}

double semisimple_a0(double b, int d) {
  if (!(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "gap constant b must be positive");
  const double hd = 0.5 * d;
  auto rate = [&](double a) { return std::min({a, b / (a * a) - hd * a, 1.0 - hd * a}); };
  double lo = 1e-9, hi = 1.0 / hd;
  // rate is increasing then decreasing in a.
  for (int it = 0; it < 200; ++it) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (rate(m1) < rate(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  return 0.5 * (lo + hi);
}

BoundReport semisimple_pipeline(const GapInput& gap, PipelineMode mode, std::int64_t n, const SpaceModel& space) {
  if (!space.is_group()) throw Error(ErrorCode::Unsupported, "semisimple pipeline needs SU2 or SO3");
  if (!(gap.b > 0.0) || gap.m0 < 1) throw Error(ErrorCode::InvalidArgument, "gap input needs b > 0 and m0 >= 1");
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "pipeline needs n >= 2");
  const int d = space.dim();
  const double nd = static_cast<double>(n);
  BoundReport rep;
  rep.inputs = {{"b", fmt(gap.b)}, {"m0", std::to_string(gap.m0)}, {"n", std::to_string(n)},
                {"space", space.name()}};
  if (mode == PipelineMode::Walk) {
    const double a0 = semisimple_a0(gap.b, d);
    const double cube = std::cbrt(nd);
    const double x = std::exp(a0 * cube);
    const double t = cube * std::exp(-a0 * cube);
    // Low regime: every irrep below x gets the nonuniform gap factor at x.
    SpectrumSlice slice = enumerate_spectrum(space, x);
    KahanSum hk, hp;
    const double L = std::log(x + 2.0);
    const double gap_factor = std::min(1.0, 4.0 * std::exp(-2.0 * gap.b * nd / (L * L)));
    for (const auto& e : slice.entries) {
      double w = std::exp(-e.eigenvalue * t) / e.eigenvalue * static_cast<double>(e.multiplicity);
      hp += w;
      hk += w * gap_factor;
    }
    const double head = hk.value();
    const double head_plain = hp.value();
    const double tail = std::max(full_inv_sum(space, t) - head_plain, 0.0);
    const double smooth = std::sqrt(d * t);
    const double spectral = 2.0 * std::sqrt(head + tail);
    rep.formula_id = "semisimple-walk";
    rep.value = smooth + spectral;
    rep.t_star = t;
    rep.components = {{"smoothing_term", smooth}, {"spectral_term", spectral}, {"low_regime", head},
                      {"high_regime", tail},      {"a0", a0},                  {"split_x", x},
                      {"gap_factor", gap_factor}};
    return rep;
  }
  // Empirical mode.
  const double logN = std::log(nd);
  const double t = std::pow(nd, -2.0 / d) * std::pow(logN, 4.0 / d);
  const double cut = 60.0 / t;
  SpectrumSlice slice = enumerate_spectrum(space, cut);
  KahanSum S;
  for (const auto& e : slice.entries) {
    const double L = std::log(e.eigenvalue + 2.0);
    const double rho = std::exp(-gap.b / (L * L));
    // sum_{j=1}^{n-1} (n - j) min(1, 2 rho^j)
    const std::int64_t j0 = std::min<std::int64_t>(n - 1, static_cast<std::int64_t>(std::floor(std::log(2.0) * L * L / gap.b)));
    KahanSum pairs;
    pairs += static_cast<double>(j0) * nd - 0.5 * static_cast<double>(j0) * static_cast<double>(j0 + 1);
    double p = 2.0 * std::pow(rho, static_cast<double>(j0 + 1));
    for (std::int64_t j = j0 + 1; j < n; ++j) {
      double term = static_cast<double>(n - j) * p;
      pairs += term;
      if (p < 1e-300 || term < 1e-18 * pairs.value()) {
        // Remaining terms sum to at most n p / (1 - rho).
        pairs += nd * p * rho / (1.0 - rho);
        break;
      }
      p *= rho;
    }
    const double h = (1.0 + 2.0 * pairs.value() / nd) / nd;
    S += std::exp(-e.eigenvalue * t) / e.eigenvalue * static_cast<double>(e.multiplicity) * h;
  }
  // Beyond the cutoff the pair factor is at most 2.
  const double tail = 2.0 * heat_sums(space, t, cut).inv_tail_bound;
  const double smooth = std::sqrt(d * t);
  const double spectral = 2.0 * std::sqrt(S.value() + tail);
  const double rate = std::pow(logN, 2.0 / d) / std::pow(nd, 1.0 / d);
  rep.formula_id = "semisimple-empirical";
  rep.value = smooth + spectral;
  rep.t_star = t;
  rep.components = {{"smoothing_term", smooth},  {"spectral_term", spectral}, {"spectral_sum", S.value()},
                    {"tail_bound", tail},        {"rate", rate},              {"constant", rep.value / rate},
                    {"rate_exponent_N", -1.0 / d}, {"log_exponent", 2.0 / d}};
  return rep;
}

BoundReport quantization_floor(std::int64_t N_atoms, const SpaceModel& space) {
  if (N_atoms < 1) throw Error(ErrorCode::InvalidArgument, "N_atoms must be positive");
  const double N = static_cast<double>(N_atoms);
  const int d = space.dim();
  BoundReport rep;
  rep.formula_id = "ball-packing-floor";
  rep.inputs = {{"N_atoms", std::to_string(N_atoms)}, {"space", space.name()}};
  // W2^2 >= int dist(y, S)^2 dVol >= int_0^{s0} 2 s (1 - N V(s)) ds, with N V(s0) = 1.
  if (space.is_torus()) {
    // Euclidean ball volume bounds the torus ball volume for every radius.
    const double omega = std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
    const double s0 = std::pow(N * omega, -1.0 / d);
    rep.value = s0 * std::sqrt(static_cast<double>(d) / (d + 2.0));
    rep.components = {{"packing_radius", s0}, {"ball_constant", omega}, {"floor", rep.value},
                      {"constant", rep.value * std::pow(N, 1.0 / d)}};
    return rep;
  }
  const double r = space.radius_scale();
  const bool so3 = space.kind() == SpaceKind::SO3;
  const double amax = so3 ? 0.5 * kPi : kPi;
  auto vol = [&](double s) {
    double a = std::min(s / r, amax);
    return (2.0 * a - std::sin(2.0 * a)) / (so3 ? kPi : 2.0 * kPi);
  };
  double lo = 0.0, hi = amax * r;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (N * vol(mid) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double s0 = 0.5 * (lo + hi);
  auto integrand = [&](double s) { return 2.0 * s * std::max(0.0, 1.0 - N * vol(s)); };
  const double I = adaptive_simpson(integrand, 0.0, s0, 1e-14 * s0 * s0 + 1e-300).value;
  rep.value = std::sqrt(std::max(I, 0.0));
  rep.components = {{"packing_radius", s0}, {"floor", rep.value}, {"constant", rep.value * std::cbrt(N)}};
  return rep;
}

}  // namespace w2lab
