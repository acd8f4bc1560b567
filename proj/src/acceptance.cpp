#include "w2lab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "w2lab/bounds.hpp"
#include "w2lab/harmonic.hpp"
#include "w2lab/lab.hpp"
#include "w2lab/rng.hpp"
#include "w2lab/spectral.hpp"
#include "w2lab/transport.hpp"

namespace w2lab {

namespace {

const double kAst = 1.0 / std::sqrt(4.0 * kPi);

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

ExperimentConfig catalog_config(int criterion, int threads) {
  for (const auto& e : list_experiments()) {
    if (e.criterion == criterion && !e.config.empty()) {
      ExperimentConfig cfg = parse_config(e.config);
      cfg.threads = threads;
      return cfg;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "no catalog config for criterion " + std::to_string(criterion));
}

RunResult run_catalog(int criterion, const AcceptanceOptions& opts) {
  ExperimentConfig cfg = catalog_config(criterion, opts.threads);
  return execute(cfg, opts.progress);
}

bool plans_ok(const RunResult& r, std::ostringstream& os) {
  int verified = 0, failed = 0;
  for (const auto& row : r.rows) {
    verified += row.plans_verified;
    failed += row.plans_failed;
  }
  if (verified > 0) os << " certificates " << verified - failed << "/" << verified << ";";
  return failed == 0;
}

CriterionResult c1(const AcceptanceOptions& opts) {
  CriterionResult res{1, "circle i.i.d. closed-form bound", true, "", 0.0, 60.0};
  RunResult r = run_catalog(1, opts);
  std::ostringstream os;
  for (const auto& row : r.rows) {
    const double limit = 2.0 / (3.0 * static_cast<double>(row.N));
    const double slack = limit / *row.mc_mean;
    os << " N=" << row.N << " mean=" << g(*row.mc_mean) << " 2/(3N)=" << g(limit) << " slack=" << g(slack) << ";";
    if (!(*row.mc_mean <= limit) || slack < 4.0) res.pass = false;
  }
  res.detail = os.str();
  return res;
}

CriterionResult c2(const AcceptanceOptions& opts) {
  CriterionResult res{2, "2-torus rate constant", true, "", 0.0, 1200.0};
  RunResult r = run_catalog(2, opts);
  std::ostringstream os;
  for (const auto& row : r.rows) {
    const double n = static_cast<double>(row.N);
    const double rate = std::sqrt(std::log(n) / n);
    const double rms = std::sqrt(*row.mc_mean);
    const double bound_ratio = *row.bound / rate;
    os << " N=" << row.N << " ratio=" << g(rms / rate) << " bound_ratio=" << g(bound_ratio) << ";";
    if (rms - *row.systematic_band > *row.bound) res.pass = false;
    if (bound_ratio > 2.5 * kAst) res.pass = false;
  }
  const auto& last = r.rows.back();
  const double n = static_cast<double>(last.N);
  const double rate = std::sqrt(std::log(n) / n);
  const double ratio = std::sqrt(*last.mc_mean) / rate;
  const double lo = (std::sqrt(std::max(*last.mc_mean - *last.mc_ci_half_width, 0.0)) - *last.systematic_band) / rate;
  const double hi = (std::sqrt(*last.mc_mean + *last.mc_ci_half_width) + *last.systematic_band) / rate;
  os << " largest-N ratio " << g(ratio) << " band interval [" << g(lo) << ", " << g(hi) << "] vs " << g(kAst) << ";";
  if (ratio < 0.20 || ratio > 0.45) res.pass = false;
  if (kAst < lo || kAst > hi) res.pass = false;
  if (!plans_ok(r, os)) res.pass = false;
  res.detail = os.str();
  return res;
}

CriterionResult c3(const AcceptanceOptions& opts) {
  CriterionResult res{3, "teleport chain mixing-aware bound", true, "", 0.0, 600.0};
  ExperimentConfig cfg = catalog_config(3, opts.threads);
  RunResult r = execute(cfg, opts.progress);
  const SpaceModel space = SpaceModel::parse(cfg.space);
  const double B = (1.0 - cfg.theta) / cfg.theta;
  std::ostringstream os;
  for (const auto& row : r.rows) {
    const double rms = std::sqrt(*row.mc_mean);
    BoundReport iid = mean_square_optimized(ProcessSpec::iid(MeasureSpec::uniform(space), row.N, 1), row.N);
    const double factor = *row.bound / iid.value;
    os << " N=" << row.N << " rms=" << g(rms) << " bound=" << g(*row.bound) << " iid_bound=" << g(iid.value)
       << " factor=" << g(factor) << ";";
    if (rms - *row.systematic_band > *row.bound) res.pass = false;
    // The mixing term multiplies the spectral part by at most (1 + 4B)^{1/2}.
    if (!(factor > 1.0) || factor > std::sqrt(1.0 + 4.0 * B) * (1.0 + 1e-9)) res.pass = false;
  }
  if (!plans_ok(r, os)) res.pass = false;
  res.detail = os.str();
  return res;
}

CriterionResult c4(const AcceptanceOptions&) {
  CriterionResult res{4, "smoothing inequality on random atomic measures", true, "", 0.0, 300.0};
  const SpaceModel space = SpaceModel::flat_torus(2);
  const int m = 128;
  std::vector<Point> grid;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) grid.push_back(make_point((i + 0.5) / m, (j + 0.5) / m));
  }
  const MeasureSpec grid_measure = MeasureSpec::empirical(space, grid);
  const double band = std::sqrt(2.0 / 12.0) / m;
  const MeasureSpec vol = MeasureSpec::uniform(space);
  int violations = 0, certified = 0, checks = 0;
  double worst = -1e300;
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(0xa7c4ULL, static_cast<std::uint64_t>(trial));
    std::vector<Point> pts;
    std::vector<double> w;
    for (int k = 0; k < 20; ++k) {
      pts.push_back(make_point(rng.uniform(), rng.uniform()));
      w.push_back(-std::log(rng.uniform_open()));
    }
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= s;
    const MeasureSpec nu = MeasureSpec::atomic(space, pts, w);
    TransportPlan plan = w2_discrete(nu, grid_measure);
    CertificateCheck chk = verify_plan(plan, nu.atoms().weights, grid_measure.atoms().weights,
                                       squared_distance_rows(space, nu.atoms().points, grid));
    if (chk.ok) ++certified;
    const double w2 = std::sqrt(plan.cost);
    for (double t : {1e-3, 1e-2, 1e-1}) {
      BoundReport b = smoothing_rhs(vol, nu, t);
      ++checks;
      worst = std::max(worst, (w2 - band) / b.value);
      if (w2 - band > b.value) ++violations;
    }
  }
  std::ostringstream os;
  os << " " << checks << " checks, " << violations << " violations, worst (W2-band)/bound=" << g(worst)
     << ", certificates " << certified << "/20";
  res.pass = violations == 0 && certified == 20;
  res.detail = os.str();
  return res;
}

CriterionResult c5(const AcceptanceOptions&) {
  CriterionResult res{5, "heat dispersion integral", true, "", 0.0, 60.0};
  std::ostringstream os;
  for (const SpaceModel& space : {SpaceModel::circle(), SpaceModel::flat_torus(2), SpaceModel::flat_torus(3),
                                  SpaceModel::su2()}) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double t = std::pow(10.0, -4.0 + 4.0 * i / 19.0);
      SpectralValue v = dispersion_integral_detailed(space, t);
      const double ratio = (v.value - v.error_bound) / (2.0 * space.dim() * t);
      worst = std::max(worst, ratio);
      if (ratio > 1.0) res.pass = false;
    }
    os << " " << space.name() << " max ratio " << g(worst) << ";";
  }
  res.detail = os.str();
  return res;
}

CriterionResult c6(const AcceptanceOptions&) {
  CriterionResult res{6, "LPS p=5 Ramanujan spectral radius", true, "", 0.0, 60.0};
  const SpaceModel su2 = SpaceModel::su2();
  FourierPacket pk = fourier_su2(lps_generators(5, su2), 25);
  SpectralRadiusReport rep = spectral_radius_q(pk);
  const double target = 2.0 * std::sqrt(5.0) / 6.0;
  double mx = 0.0;
  for (double s : rep.per_irrep) mx = std::max(mx, s);
  std::ostringstream os;
  os << " max singular value " << g(mx) << " at n=" << rep.attaining_irrep << ", 2 sqrt5/6=" << g(target);
  // Regression target frozen from a first high-precision evaluation.
  const double frozen = 0.729309;
  os << ", frozen " << frozen;
  res.pass = mx <= target + 1e-9 && std::abs(mx - target) <= 0.05 && std::abs(mx - frozen) <= 1e-6;
  res.detail = os.str();
  return res;
}

CriterionResult c7(const AcceptanceOptions&) {
  CriterionResult res{7, "circle spectral-radius bound and 2-torus constant", true, "", 0.0, 60.0};
  const SpaceModel circle = SpaceModel::circle();
  TrigTerm term;
  term.k[0] = 1;
  term.a = 0.5;
  const MeasureSpec nu = MeasureSpec::mixture(circle, 0.5, {term});
  const double w2 = std::sqrt(w2_circle_exact(nu, MeasureSpec::uniform(circle)));
  const double q = 0.25;
  const double bound = q_w2_bound(q, circle).value;
  const double audit = torus2_constant_audit();
  std::ostringstream os;
  os << " W2=" << g(w2) << " bound=" << g(bound) << " audit=" << g(audit);
  res.pass = w2 <= bound && std::abs(bound - 0.25 / std::sqrt(3.0)) < 1e-12 && audit >= 2.76 && audit <= 2.78;
  res.detail = os.str();
  return res;
}

CriterionResult c8(const AcceptanceOptions& opts) {
  CriterionResult res{8, "LPS random-walk empirical bound", true, "", 0.0, 900.0};
  ExperimentConfig cfg = catalog_config(8, opts.threads);
  const SpaceModel space = SpaceModel::parse(cfg.space);
  const MeasureSpec gens = lps_generators(cfg.lps_prime, space);
  SpectralRadiusReport qrep = spectral_radius_q(fourier_group(gens, cfg.n_max));
  const double q = qrep.closed_form ? *qrep.closed_form : qrep.q_at_cutoff;
  const double B = walk_budget(q);
  std::ostringstream os;
  os << " q=" << g(q) << " B=" << g(B) << ";";
  int below = 0, total = 0, verified = 0, failed = 0;
  for (std::size_t i = 0; i < cfg.N.size(); ++i) {
    const std::int64_t N = cfg.N[i];
    BoundReport bound = rw_empirical_bound(B, N, space);
    const double t = *bound.t_star;
    const double spectral = bound.component("spectral_sum");
    MCOptions mo;
    mo.threads = cfg.threads;
    mo.semidiscrete.reference_size = cfg.reference_size;
    mo.semidiscrete.verify = true;
    int local_below = 0;
    mo.observer = [&](int, const SampleTrace& tr, double) {
      FourierPacket pk = fourier_su2(space, tr.points, 15);
      KahanSum s;
      for (const auto& [lam, w] : pk.shell_weights()) s += std::exp(-lam * t) / lam * w;
      if (s.value() <= spectral) ++local_below;
    };
    ProcessSpec proc = ProcessSpec::walk(gens, N, cfg.seed);
    MCEstimate est = mc_expected_w2sq(proc, MeasureSpec::uniform(space), cfg.replicates,
                                      cfg.seed * 1000003ULL + i, mo);
    below += local_below;
    total += est.replicates;
    verified += est.plans_verified;
    failed += est.plans_failed;
    const double rms = std::sqrt(est.mean);
    os << " N=" << N << " rms=" << g(rms) << " bound=" << g(bound.value) << " band=" << g(est.systematic_band)
       << " fourier_below=" << local_below << "/" << est.replicates << ";";
    if (rms > bound.value + est.systematic_band) res.pass = false;
    if (opts.progress) opts.progress("criterion 8: N=" + std::to_string(N) + " done");
  }
  os << " certificates " << verified - failed << "/" << verified << " (heuristic reference band)";
  if (below < 0.95 * total) res.pass = false;
  if (failed > 0) res.pass = false;
  res.detail = os.str();
  return res;
}

CriterionResult c9(const AcceptanceOptions& opts) {
  CriterionResult res{9, "two-island lower-bound slope", true, "", 0.0, 600.0};
  RunResult r = run_catalog(9, opts);
  std::ostringstream os;
  os << " slope=" << g(r.fit->slope) << " over " << r.fit->points << " N values;";
  res.pass = std::abs(r.fit->slope + 0.5) <= 0.1;
  if (!plans_ok(r, os)) res.pass = false;
  res.detail = os.str();
  return res;
}

CriterionResult c10(const AcceptanceOptions&) {
  CriterionResult res{10, "transport oracle equivalence and certificates", true, "", 0.0, 60.0};
  double worst = 0.0;
  int cert_fail = 0;
  for (int inst = 0; inst < 100; ++inst) {
    Rng rng(0x10ULL, static_cast<std::uint64_t>(inst));
    const int m = 1 + static_cast<int>(rng.below(4));
    const int n = 1 + static_cast<int>(rng.below(4));
    std::vector<double> a(static_cast<std::size_t>(m)), b(static_cast<std::size_t>(n));
    for (auto& x : a) x = rng.uniform_open();
    for (auto& x : b) x = rng.uniform_open();
    const double sa = std::accumulate(a.begin(), a.end(), 0.0);
    const double sb = std::accumulate(b.begin(), b.end(), 0.0);
    for (auto& x : a) x /= sa;
    for (auto& x : b) x /= sb;
    std::vector<std::vector<double>> c(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(n)));
    for (auto& row : c) {
      for (auto& x : row) x = rng.uniform();
    }
    CostRows rows = [&](int i, double* out) {
      for (int j = 0; j < n; ++j) out[j] = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    };
    TransportPlan plan = solve_transport(a, b, rows, 1.0);
    const double oracle = brute_force_transport(a, b, c);
    worst = std::max(worst, std::abs(plan.cost - oracle));
    if (!verify_plan(plan, a, b, rows).ok) ++cert_fail;
  }
  // Certificates on representative experiment-sized plans.
  int checked = 0;
  auto check = [&](const std::vector<Point>& pts, const MeasureSpec& target, SemiDiscreteOptions so) {
    so.verify = true;
    SemiDiscreteResult sd = w2_semidiscrete(pts, target, so);
    ++checked;
    if (!sd.certificate || !sd.certificate->ok) ++cert_fail;
  };
  {
    const SpaceModel t2 = SpaceModel::flat_torus(2);
    SemiDiscreteOptions so;
    so.grid = 48;
    check(sample(ProcessSpec::iid(MeasureSpec::uniform(t2), 512, 77)).points, MeasureSpec::uniform(t2), so);
    check(sample(ProcessSpec::teleport(MeasureSpec::uniform(t2), 0.2, 512, 77)).points, MeasureSpec::uniform(t2), so);
    ProcessSpec isl = ProcessSpec::two_island(t2, 512, 77);
    check(sample(isl).points, isl.stationary(), so);
    const SpaceModel su2 = SpaceModel::su2();
    SemiDiscreteOptions sg;
    sg.reference_size = 1024;
    check(sample(ProcessSpec::walk(lps_generators(5, su2), 256, 77)).points, MeasureSpec::uniform(su2), sg);
  }
  std::ostringstream os;
  os << " max |simplex - enumeration| = " << g(worst) << " over 100 instances; certificate failures "
     << cert_fail << " (" << 100 + checked << " plans)";
  res.pass = worst <= 1e-12 && cert_fail == 0;
  res.detail = os.str();
  return res;
}

}  // namespace

double brute_force_transport(const std::vector<double>& a, const std::vector<double>& b,
                             const std::vector<std::vector<double>>& cost) {
  const int m = static_cast<int>(a.size()), n = static_cast<int>(b.size());
  const int cells = m * n, k = m + n - 1;
  if (cells > 20) throw Error(ErrorCode::InvalidArgument, "brute force limited to 20 cells");
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(k));
  std::vector<int> parent(static_cast<std::size_t>(m + n));
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (unsigned mask = 0; mask < (1u << cells); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    std::iota(parent.begin(), parent.end(), 0);
    bool tree = true;
    int idx = 0;
    for (int e = 0; e < cells && tree; ++e) {
      if (!(mask >> e & 1u)) continue;
      int u = find(e / n), v = find(m + e % n);
      if (u == v) tree = false;
      parent[u] = v;
      pick[static_cast<std::size_t>(idx++)] = e;
    }
    if (!tree) continue;
    // Peel leaves to get the unique flow on the spanning tree.
    std::vector<double> rem(static_cast<std::size_t>(m + n));
    for (int i = 0; i < m; ++i) rem[i] = a[i];
    for (int j = 0; j < n; ++j) rem[m + j] = b[j];
    std::vector<char> used(static_cast<std::size_t>(k), 0);
    std::vector<int> deg(static_cast<std::size_t>(m + n), 0);
    for (int e : pick) {
      ++deg[e / n];
      ++deg[m + e % n];
    }
    double total = 0.0;
    bool feasible = true;
    for (int step = 0; step < k; ++step) {
      int leaf_edge = -1, leaf = -1;
      for (int q = 0; q < k && leaf_edge < 0; ++q) {
        if (used[q]) continue;
        int e = pick[q];
        if (deg[e / n] == 1) {
          leaf_edge = q;
          leaf = e / n;
        } else if (deg[m + e % n] == 1) {
          leaf_edge = q;
          leaf = m + e % n;
        }
      }
      int e = pick[leaf_edge];
      int u = e / n, v = m + e % n;
      int other = leaf == u ? v : u;
      double f = rem[leaf];
      if (f < -1e-14) feasible = false;
      rem[leaf] = 0.0;
      rem[other] -= f;
      used[leaf_edge] = 1;
      --deg[u];
      --deg[v];
      total += f * cost[e / n][e % n];
    }
    if (feasible) best = std::min(best, total);
  }
  return best;
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = c1(opts); break;
      case 2: r = c2(opts); break;
      case 3: r = c3(opts); break;
      case 4: r = c4(opts); break;
      case 5: r = c5(opts); break;
      case 6: r = c6(opts); break;
      case 7: r = c7(opts); break;
      case 8: r = c8(opts); break;
      case 9: r = c9(opts); break;
      case 10: r = c10(opts); break;
      default: throw Error(ErrorCode::InvalidArgument, "no criterion " + std::to_string(id));
    }
  } catch (const std::exception& e) {
    if (id < 1 || id > 10) throw;
    r.id = id;
    r.name = "criterion " + std::to_string(id);
    r.pass = false;
    r.detail = std::string(" error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.time_limit > 0.0 && r.seconds > r.time_limit) {
    r.pass = false;
    r.detail += " runtime over limit";
  }
  return r;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& opts) {
  std::vector<CriterionResult> out;
  for (int id : ids) out.push_back(run_criterion(id, opts));
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.1f", r.seconds);
  os << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " [" << r.name << "] (" << secs << " s, limit "
     << r.time_limit << " s):" << r.detail;
  return os.str();
}

}  // namespace w2lab
