#include "w2lab/transport.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "w2lab/harmonic.hpp"
#include "w2lab/network_simplex.hpp"
#include "w2lab/quadrature.hpp"

namespace w2lab {

namespace {

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Smallest D with every w * D integral (up to 1e-9) and the rounded masses summing to D.
std::uint64_t integer_scale(const std::vector<double>& w) {
  double wmin = *std::min_element(w.begin(), w.end());
  if (!(wmin > 0.0)) return 0;
  double base = std::round(1.0 / wmin);
  if (base < 1.0 || base > 1e12) return 0;
  for (int k = 1; k <= 64; ++k) {
    double D = base * k;
    if (D > 1e13) break;
    bool ok = true;
    double total = 0.0;
    for (double x : w) {
      double v = x * D;
      double r = std::round(v);
      if (std::abs(v - r) > 1e-9 * std::max(1.0, v) || r < 1.0) {
        ok = false;
        break;
      }
      total += r;
    }
    if (ok && total == D) return static_cast<std::uint64_t>(D);
  }
  return 0;
}

struct TopK {
  explicit TopK(int k) : k_(k) {}
  void clear() { items_.clear(); }
  void offer(double v, int j) {
    if (static_cast<int>(items_.size()) < k_) {
      items_.emplace_back(v, j);
      std::push_heap(items_.begin(), items_.end());
    } else if (v < items_.front().first) {
      std::pop_heap(items_.begin(), items_.end());
      items_.back() = {v, j};
      std::push_heap(items_.begin(), items_.end());
    }
  }
  double worst() const {
    return static_cast<int>(items_.size()) < k_ ? std::numeric_limits<double>::infinity()
                                                : items_.front().first;
  }
  const std::vector<std::pair<double, int>>& items() const { return items_; }

 private:
  int k_;
  std::vector<std::pair<double, int>> items_;
};

struct Aggregated {
  std::vector<Point> points;
  std::vector<double> weights;
  std::vector<std::int64_t> counts;
};

Aggregated aggregate(const SpaceModel& space, const std::vector<Point>& pts) {
  std::vector<Point> sorted;
  sorted.reserve(pts.size());
  for (const auto& p : pts) sorted.push_back(canonical_point(space, p));
  std::sort(sorted.begin(), sorted.end(), [](const Point& a, const Point& b) { return a.c < b.c; });
  Aggregated out;
  for (const auto& p : sorted) {
    if (!out.points.empty() && out.points.back() == p) {
      ++out.counts.back();
    } else {
      out.points.push_back(p);
      out.counts.push_back(1);
    }
  }
  const double n = static_cast<double>(pts.size());
  for (auto c : out.counts) out.weights.push_back(static_cast<double>(c) / n);
  return out;
}

double cost_bound_for(const SpaceModel& space) {
  double d = space.diameter();
  return d * d * (1.0 + 1e-12);
}

}  // namespace

CostRows squared_distance_rows(const SpaceModel& space, const std::vector<Point>& xs,
                               const std::vector<Point>& ys) {
  const std::size_t M = ys.size();
  if (space.is_torus()) {
    const int d = space.dim();
    std::vector<double> ycoord(static_cast<std::size_t>(d) * M);
    for (std::size_t j = 0; j < M; ++j) {
      Point c = canonical_point(space, ys[j]);
      for (int i = 0; i < d; ++i) ycoord[static_cast<std::size_t>(i) * M + j] = c[i];
    }
    std::vector<Point> xc;
    xc.reserve(xs.size());
    for (const auto& x : xs) xc.push_back(canonical_point(space, x));
    return [d, M, ycoord = std::move(ycoord), xc = std::move(xc)](int i, double* out) {
      std::fill(out, out + M, 0.0);
      for (int k = 0; k < d; ++k) {
        const double xv = xc[static_cast<std::size_t>(i)][k];
        const double* yv = &ycoord[static_cast<std::size_t>(k) * M];
        for (std::size_t j = 0; j < M; ++j) {
          double t = std::abs(xv - yv[j]);
          t = std::min(t, 1.0 - t);
          out[j] += t * t;
        }
      }
    };
  }
  std::vector<double> yq(4 * M);
  for (std::size_t j = 0; j < M; ++j) {
    for (int i = 0; i < 4; ++i) yq[static_cast<std::size_t>(i) * M + j] = ys[j][i];
  }
  const double r2 = space.radius_scale() * space.radius_scale();
  const bool so3 = space.kind() == SpaceKind::SO3;
  return [M, r2, so3, yq = std::move(yq), xs](int i, double* out) {
    const Point& x = xs[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < M; ++j) {
      double dm = 0.0, dp = 0.0;
      for (int k = 0; k < 4; ++k) {
        double y = yq[static_cast<std::size_t>(k) * M + j];
        double a = x[k] - y, b = x[k] + y;
        dm += a * a;
        dp += b * b;
      }
      dm = std::sqrt(dm);
      dp = std::sqrt(dp);
      double ang = so3 ? 2.0 * std::atan2(std::min(dm, dp), std::max(dm, dp)) : 2.0 * std::atan2(dm, dp);
      out[j] = r2 * ang * ang;
    }
  };
}

TransportPlan solve_transport(const std::vector<double>& a, const std::vector<double>& b,
                              const CostRows& rows, double cost_bound, const TransportOptions& opts) {
  const int N = static_cast<int>(a.size());
  const int M = static_cast<int>(b.size());
  if (N == 0 || M == 0) throw Error(ErrorCode::InvalidArgument, "empty measure");
  KahanSum sa, sb;
  for (double x : a) sa += x;
  for (double x : b) sb += x;
  if (std::abs(sa.value() - sb.value()) > 1e-12) {
    std::ostringstream msg;
    msg << "weight sums differ: " << sa.value() << " vs " << sb.value();
    throw Error(ErrorCode::Infeasible, msg.str());
  }
  const std::size_t budget = opts.arc_budget ? opts.arc_budget : solver_budget();

  std::vector<double> supply = a, demand = b;
  double scale = 1.0;
  bool integral = false;
  std::uint64_t Da = integer_scale(a), Db = integer_scale(b);
  if (Da && Db) {
    std::uint64_t g = gcd_u64(Da, Db);
    double D = static_cast<double>(Da / g) * static_cast<double>(Db);
    if (D <= 9.0e15) {
      scale = D;
      integral = true;
      for (auto& x : supply) x = std::round(x * D);
      for (auto& x : demand) x = std::round(x * D);
    }
  }

  NetworkSimplex ns(supply, demand, cost_bound);
  std::vector<double> buf(static_cast<std::size_t>(M));
  SolverStats stats;
  stats.integer_masses = integral;
  const double pairs = static_cast<double>(N) * static_cast<double>(M);

  auto check_budget = [&]() {
    if (ns.arc_count() > budget) {
      std::ostringstream msg;
      msg << "transport solver needs more than " << budget << " arcs (" << N << " x " << M << ")";
      throw Error(ErrorCode::BudgetExceeded, msg.str());
    }
  };
  auto run = [&]() {
    if (ns.solve() != NetworkSimplex::Status::Optimal) {
      throw Error(ErrorCode::BudgetExceeded, "transport solver hit its pivot limit");
    }
  };

  if (pairs <= static_cast<double>(opts.dense_pairs)) {
    if (pairs > static_cast<double>(budget)) check_budget();
    for (int i = 0; i < N; ++i) {
      rows(i, buf.data());
      for (int j = 0; j < M; ++j) ns.add_arc(i, j, buf[static_cast<std::size_t>(j)]);
    }
    check_budget();
    run();
  } else {
    std::vector<std::pair<int, int>> cand;
    TopK row_best(opts.row_candidates);
    const int kc = opts.column_candidates;
    std::vector<double> col_cost(static_cast<std::size_t>(M) * kc, std::numeric_limits<double>::infinity());
    std::vector<int> col_idx(static_cast<std::size_t>(M) * kc, -1);
    for (int i = 0; i < N; ++i) {
      rows(i, buf.data());
      row_best.clear();
      for (int j = 0; j < M; ++j) {
        double c = buf[static_cast<std::size_t>(j)];
        if (c < row_best.worst()) row_best.offer(c, j);
        double* cc = &col_cost[static_cast<std::size_t>(j) * kc];
        int* ci = &col_idx[static_cast<std::size_t>(j) * kc];
        if (c < cc[kc - 1]) {
          int p = kc - 1;
          while (p > 0 && cc[p - 1] > c) {
            cc[p] = cc[p - 1];
            ci[p] = ci[p - 1];
            --p;
          }
          cc[p] = c;
          ci[p] = i;
        }
      }
      for (const auto& [c, j] : row_best.items()) cand.emplace_back(i, j);
    }
    for (int j = 0; j < M; ++j) {
      for (int k = 0; k < kc; ++k) {
        int i = col_idx[static_cast<std::size_t>(j) * kc + k];
        if (i >= 0) cand.emplace_back(i, j);
      }
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    {
      int last = -1;
      for (const auto& [i, j] : cand) {
        if (i != last) {
          rows(i, buf.data());
          last = i;
        }
        ns.add_arc(i, j, buf[static_cast<std::size_t>(j)]);
      }
    }
    check_budget();
    // Few sources against many targets need wider rounds.
    const int per_row = std::max(opts.arcs_per_row_round, M / std::max(1, 8 * N));
    TopK worst(per_row);
    for (int round = 0;; ++round) {
      run();
      if (round >= opts.max_rounds) {
        throw Error(ErrorCode::BudgetExceeded, "column generation did not converge");
      }
      const double eps = ns.optimality_tolerance();
      std::size_t added = 0;
      for (int i = 0; i < N; ++i) {
        rows(i, buf.data());
        worst.clear();
        const double ui = ns.source_dual(i);
        for (int j = 0; j < M; ++j) {
          double rc = buf[static_cast<std::size_t>(j)] - ui - ns.target_dual(j);
          if (rc < -eps && rc < worst.worst()) worst.offer(rc, j);
        }
        for (const auto& [rc, j] : worst.items()) {
          ns.add_arc(i, j, buf[static_cast<std::size_t>(j)]);
          ++added;
        }
      }
      stats.pricing_rounds = round + 1;
      if (added == 0) break;
      check_budget();
    }
  }

  const double total = integral ? scale : sa.value();
  if (ns.artificial_flow() > 1e-9 * total) {
    throw Error(ErrorCode::Infeasible, "transport problem has no feasible coupling");
  }

  TransportPlan plan;
  KahanSum cost;
  for (std::size_t e = 0; e < ns.arc_count(); ++e) {
    int arc = static_cast<int>(e);
    double f = ns.arc_flow(arc);
    if (f <= 0.0 || (integral && f < 0.5)) continue;
    double mass = f / scale;
    plan.couplings.push_back({ns.arc_source(arc), ns.arc_target(arc), mass});
    cost += mass * ns.arc_cost(arc);
  }
  std::sort(plan.couplings.begin(), plan.couplings.end(), [](const Coupling& x, const Coupling& y) {
    return x.source != y.source ? x.source < y.source : x.target < y.target;
  });
  plan.cost = std::max(cost.value(), 0.0);
  plan.source_duals.resize(static_cast<std::size_t>(N));
  plan.target_duals.resize(static_cast<std::size_t>(M));
  KahanSum dual;
  for (int i = 0; i < N; ++i) {
    plan.source_duals[static_cast<std::size_t>(i)] = ns.source_dual(i);
    dual += a[static_cast<std::size_t>(i)] * ns.source_dual(i);
  }
  for (int j = 0; j < M; ++j) {
    plan.target_duals[static_cast<std::size_t>(j)] = ns.target_dual(j);
    dual += b[static_cast<std::size_t>(j)] * ns.target_dual(j);
  }
  plan.dual_objective = dual.value();
  stats.pivots = ns.pivots();
  stats.arcs = ns.arc_count();
  stats.tolerance = ns.optimality_tolerance();
  plan.stats = stats;
  return plan;
}

TransportPlan w2_discrete(const MeasureSpec& mu, const MeasureSpec& nu, const TransportOptions& opts) {
  if (!(mu.space() == nu.space())) throw Error(ErrorCode::InvalidArgument, "measures live on different spaces");
  if (!mu.is_atomic() || !nu.is_atomic()) {
    throw Error(ErrorCode::Unsupported, "w2_discrete needs two atomic measures");
  }
  const auto& A = mu.atoms();
  const auto& B = nu.atoms();
  return solve_transport(A.weights, B.weights, squared_distance_rows(mu.space(), A.points, B.points),
                         cost_bound_for(mu.space()), opts);
}

CertificateCheck verify_plan(const TransportPlan& plan, const std::vector<double>& a,
                             const std::vector<double>& b, const CostRows& rows) {
  CertificateCheck chk;
  const std::size_t N = a.size(), M = b.size();
  std::vector<double> ra(N, 0.0), rb(M, 0.0);
  std::vector<double> buf(M);
  KahanSum cost;
  std::map<std::pair<int, int>, double> mass;
  for (const auto& c : plan.couplings) {
    ra[static_cast<std::size_t>(c.source)] += c.mass;
    rb[static_cast<std::size_t>(c.target)] += c.mass;
    mass[{c.source, c.target}] += c.mass;
  }
  for (std::size_t i = 0; i < N; ++i) chk.max_marginal_error = std::max(chk.max_marginal_error, std::abs(ra[i] - a[i]));
  for (std::size_t j = 0; j < M; ++j) chk.max_marginal_error = std::max(chk.max_marginal_error, std::abs(rb[j] - b[j]));
  auto it = mass.begin();
  for (std::size_t i = 0; i < N; ++i) {
    rows(static_cast<int>(i), buf.data());
    for (std::size_t j = 0; j < M; ++j) {
      double gap = plan.source_duals[i] + plan.target_duals[j] - buf[j];
      chk.max_dual_violation = std::max(chk.max_dual_violation, gap);
    }
    while (it != mass.end() && it->first.first == static_cast<int>(i)) {
      std::size_t j = static_cast<std::size_t>(it->first.second);
      cost += it->second * buf[j];
      double gap = std::abs(plan.source_duals[i] + plan.target_duals[j] - buf[j]);
      chk.max_slackness_gap = std::max(chk.max_slackness_gap, gap);
      ++it;
    }
  }
  chk.cost_mismatch = std::abs(cost.value() - plan.cost);
  chk.ok = chk.max_marginal_error <= 1e-10 && chk.max_dual_violation <= 1e-8 &&
           chk.max_slackness_gap <= 1e-8 && chk.cost_mismatch <= 1e-10;
  return chk;
}

namespace {

// Convex one-dimensional minimization: coarse scan, then golden section.
template <class F>
std::pair<double, double> minimize_convex(F&& f, double lo, double hi, double tol) {
  constexpr int kScan = 64;
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  std::vector<double> xs(kScan + 1);
  for (int i = 0; i <= kScan; ++i) {
    xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / kScan;
    double v = f(xs[static_cast<std::size_t>(i)]);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  double a = xs[static_cast<std::size_t>(std::max(best - 1, 0))];
  double b = xs[static_cast<std::size_t>(std::min(best + 1, kScan))];
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  double x = 0.5 * (a + b);
  double v = f(x);
  if (best_v < v) return {xs[static_cast<std::size_t>(best)], best_v};
  return {x, v};
}

}  // namespace

double w2_circle_exact(const std::vector<Point>& points, const MeasureSpec& nu) {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "no points");
  Aggregated ag = aggregate(SpaceModel::circle(), points);
  return w2_circle_exact(MeasureSpec(SpaceModel::circle(), Atomic{ag.points, ag.weights, 0}), nu);
}

double w2_circle_exact(const MeasureSpec& mu, const MeasureSpec& nu) {
  if (mu.space().kind() != SpaceKind::Circle || nu.space().kind() != SpaceKind::Circle) {
    throw Error(ErrorCode::Unsupported, "w2_circle_exact needs the circle");
  }
  if (nu.is_atomic()) {
    if (mu.is_atomic()) return w2_discrete(mu, nu).cost;
    return w2_circle_exact(nu, mu);
  }
  CircleLaw law(nu);
  if (mu.is_atomic()) {
    const auto& at = mu.atoms();
    std::vector<std::size_t> order(at.points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return at.points[i][0] < at.points[j][0];
    });
    std::vector<double> x, cum{0.0};
    KahanSum acc;
    for (std::size_t i : order) {
      x.push_back(at.points[i][0] - std::floor(at.points[i][0]));
      acc += at.weights[i];
      cum.push_back(acc.value());
    }
    cum.back() = 1.0;
    std::vector<double> q(cum.size());
    auto cost = [&](double theta) {
      for (std::size_t k = 0; k < cum.size(); ++k) q[k] = law.quantile(cum[k] + theta);
      KahanSum s;
      for (std::size_t j = 0; j < x.size(); ++j) s += law.moment(x[j], q[j], q[j + 1]);
      return s.value();
    };
    return std::max(minimize_convex(cost, -1.0, 1.0, 1e-12).second, 0.0);
  }
  CircleLaw mlaw(mu);
  if (law.is_uniform() || mlaw.is_uniform()) {
    const CircleLaw& other = law.is_uniform() ? mlaw : law;
    // Var(X - F(X)) under the non-uniform law.
    auto g1 = [&](double y) { return (y - other.cdf(y)) * other.density(y); };
    auto g2 = [&](double y) {
      double v = y - other.cdf(y);
      return v * v * other.density(y);
    };
    double m1 = adaptive_simpson(g1, 0.0, 1.0, 1e-14).value;
    double m2 = adaptive_simpson(g2, 0.0, 1.0, 1e-14).value;
    return std::max(m2 - m1 * m1, 0.0);
  }
  auto cost = [&](double theta) {
    auto f = [&](double u) {
      double d = mlaw.quantile(u) - law.quantile(u + theta);
      return d * d;
    };
    return adaptive_simpson(f, 0.0, 1.0, 1e-12).value;
  };
  return std::max(minimize_convex(cost, -1.0, 1.0, 1e-10).second, 0.0);
}

CircleDiscretization discretize_circle(const MeasureSpec& nu, int m) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "discretization needs m >= 1");
  CircleLaw law(nu);
  std::vector<Point> pts;
  std::vector<double> w(static_cast<std::size_t>(m), 1.0 / m);
  KahanSum err;
  for (int i = 0; i < m; ++i) {
    double lo = law.quantile(static_cast<double>(i) / m);
    double hi = law.quantile(static_cast<double>(i + 1) / m);
    double y = law.quantile((i + 0.5) / m);
    pts.push_back(make_point(y - std::floor(y)));
    err += law.moment(y, lo, hi);
  }
  return {MeasureSpec(SpaceModel::circle(), Atomic{pts, w, 0}), std::sqrt(std::max(err.value(), 0.0))};
}

namespace {

struct Reference {
  std::vector<Point> points;
  std::vector<double> weights;
  double error = 0.0;
  bool certified = false;
  ReferenceKind kind = ReferenceKind::UniformGrid;
};

// Cell integrals of a trigonometric density over the m^d grid.
std::vector<double> mixture_cell_masses(const MixtureDensity& mix, int d, int m) {
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(m);
  std::vector<double> w(total, 1.0 / static_cast<double>(total));
  const double h = 1.0 / m;
  for (const auto& t : mix.terms) {
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t r = idx;
      Complex prod(1.0);
      for (int i = 0; i < d; ++i) {
        double lo = static_cast<double>(r % static_cast<std::size_t>(m)) * h;
        r /= static_cast<std::size_t>(m);
        if (t.k[i] == 0) {
          prod *= h;
        } else {
          double om = kTwoPi * t.k[i];
          prod *= (std::polar(1.0, om * (lo + h)) - std::polar(1.0, om * lo)) / Complex(0.0, om);
        }
      }
      // a cos + b sin = Re((a - i b) e^{i phase})
      w[idx] += (Complex(t.a, -t.b) * prod).real();
    }
  }
  for (double& x : w) x = std::max(x, 0.0);
  double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= s;
  return w;
}

Reference torus_reference(const MeasureSpec& target, int m) {
  const SpaceModel& space = target.space();
  const int d = space.dim();
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "grid side must be positive");
  double cells = std::pow(static_cast<double>(m), d);
  if (cells > 5.0e7) throw Error(ErrorCode::BudgetExceeded, "reference grid too large");
  const std::size_t total = static_cast<std::size_t>(cells);
  Reference ref;
  // Moving each cell's mass to its centre costs d / (12 m^2) per unit of uniform mass.
  ref.error = std::sqrt(d / 12.0) / m;
  ref.certified = true;
  std::vector<Point> centers(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    for (int i = 0; i < d; ++i) {
      centers[idx][i] = (static_cast<double>(r % static_cast<std::size_t>(m)) + 0.5) / m;
      r /= static_cast<std::size_t>(m);
    }
  }
  const auto& body = target.body();
  if (std::holds_alternative<Uniform>(body)) {
    ref.points = std::move(centers);
    ref.weights.assign(total, 1.0 / static_cast<double>(total));
    return ref;
  }
  ref.kind = ReferenceKind::WeightedGrid;
  std::vector<double> w;
  if (const auto* mix = std::get_if<MixtureDensity>(&body)) {
    w = mixture_cell_masses(*mix, d, m);
    ref.error = std::sqrt(std::min(3.0, target.density_sup()) * d / 12.0) / m;
  } else {
    const auto& is = std::get<Islands>(body);
    w.assign(total, 0.0);
    std::vector<std::size_t> count(is.boxes.size(), 0);
    std::vector<int> owner(total, -1);
    for (std::size_t idx = 0; idx < total; ++idx) {
      for (std::size_t b = 0; b < is.boxes.size(); ++b) {
        bool in = true;
        for (int i = 0; i < d; ++i) {
          if (centers[idx][i] < is.boxes[b].lo[i] || centers[idx][i] >= is.boxes[b].hi[i]) in = false;
        }
        if (in) {
          owner[idx] = static_cast<int>(b);
          ++count[b];
          break;
        }
      }
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
      if (owner[idx] >= 0) {
        auto b = static_cast<std::size_t>(owner[idx]);
        w[idx] = is.masses[b] / static_cast<double>(count[b]);
      }
    }
    // Cells tile the islands exactly only when the box edges sit on grid lines.
    for (const auto& box : is.boxes) {
      for (int i = 0; i < d; ++i) {
        double lo = box.lo[i] * m, hi = box.hi[i] * m;
        if (std::abs(lo - std::round(lo)) > 1e-9 || std::abs(hi - std::round(hi)) > 1e-9) {
          ref.certified = false;
        }
      }
    }
  }
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (w[idx] > 0.0) {
      ref.points.push_back(centers[idx]);
      ref.weights.push_back(w[idx]);
    }
  }
  return ref;
}

// Smoothing-inequality estimate of W2(reference, Haar) from the reference's own Fourier data.
double group_reference_band(const SpaceModel& space, const std::vector<Point>& pts,
                            const std::vector<double>& w) {
  constexpr int kIrreps = 16;
  FourierPacket pk = fourier_su2(MeasureSpec(space, Atomic{pts, w, 0}), kIrreps);
  auto shells = pk.shell_weights();
  const double r = space.radius_scale();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 80; ++i) {
    double t = std::pow(10.0, -6.0 + 6.0 * i / 80.0);
    KahanSum s;
    for (const auto& [lam, wt] : shells) s += std::exp(-lam * t) / lam * wt;
    double lam_cut = (kIrreps * kIrreps - 1.0) / (r * r);
    HeatSums hs = heat_sums(space, t, lam_cut);
    double total = s.value() + 4.0 * hs.inv_tail_bound;
    best = std::min(best, std::sqrt(3.0 * t) + 2.0 * std::sqrt(total));
  }
  return best;
}

const Reference& group_reference(const SpaceModel& space, int M, std::uint64_t seed) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, std::uint64_t>, Reference> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(static_cast<int>(space.kind()), M, seed);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  ProcessSpec proc = ProcessSpec::iid(MeasureSpec::uniform(space), M, seed);
  SampleTrace tr = sample(proc, 0);
  Reference ref;
  ref.kind = ReferenceKind::HaarReference;
  ref.points = tr.points;
  ref.weights.assign(static_cast<std::size_t>(M), 1.0 / M);
  ref.error = group_reference_band(space, ref.points, ref.weights);
  ref.certified = false;
  return cache.emplace(key, std::move(ref)).first->second;
}

}  // namespace

SemiDiscreteResult w2_semidiscrete(const std::vector<Point>& points, const MeasureSpec& target,
                                   const SemiDiscreteOptions& opts) {
  const SpaceModel& space = target.space();
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "no points");
  Aggregated ag = aggregate(space, points);
  SemiDiscreteResult res;
  if (target.is_atomic()) {
    const auto& at = target.atoms();
    CostRows rows = squared_distance_rows(space, ag.points, at.points);
    res.plan = solve_transport(ag.weights, at.weights, rows, cost_bound_for(space), opts.transport);
    res.value = std::sqrt(res.plan.cost);
    res.certified = true;
    if (opts.verify) res.certificate = verify_plan(res.plan, ag.weights, at.weights, rows);
    return res;
  }
  Reference local;
  const Reference* ref = nullptr;
  if (space.is_torus()) {
    local = torus_reference(target, opts.grid);
    ref = &local;
  } else {
    const Reference& base = group_reference(space, opts.reference_size, opts.reference_seed);
    if (target.is_uniform()) {
      ref = &base;
    } else {
      local = base;
      KahanSum s;
      for (std::size_t j = 0; j < local.points.size(); ++j) {
        local.weights[j] = target.density(local.points[j]);
        s += local.weights[j];
      }
      for (auto& x : local.weights) x /= s.value();
      ref = &local;
    }
  }
  CostRows rows = squared_distance_rows(space, ag.points, ref->points);
  res.plan = solve_transport(ag.weights, ref->weights, rows, cost_bound_for(space), opts.transport);
  res.value = std::sqrt(res.plan.cost);
  if (opts.verify) res.certificate = verify_plan(res.plan, ag.weights, ref->weights, rows);
  res.error_bound = ref->error;
  res.certified = ref->certified;
  res.reference = ref->kind;
  return res;
}

SemiDiscreteResult w2_semidiscrete(const SampleTrace& trace, const SpaceModel& space, int m) {
  SemiDiscreteOptions opts;
  opts.grid = m;
  return w2_semidiscrete(trace.points, MeasureSpec::uniform(space), opts);
}

double student_t_quantile(double p, double dof) {
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, p);
}

MCEstimate summarize(const std::vector<double>& values, std::uint64_t seed) {
  MCEstimate est;
  est.values = values;
  est.replicates = static_cast<int>(values.size());
  est.seed = seed;
  KahanSum s;
  for (double v : values) s += v;
  const double R = static_cast<double>(values.size());
  est.mean = std::max(s.value() / R, 0.0);
  KahanSum ss;
  for (double v : values) ss += (v - est.mean) * (v - est.mean);
  est.variance = values.size() > 1 ? ss.value() / (R - 1.0) : 0.0;
  est.ci_half_width = values.size() > 1 ? student_t_quantile(0.975, R - 1.0) * std::sqrt(est.variance / R) : 0.0;
  return est;
}

MCEstimate mc_expected_w2sq(const ProcessSpec& process, const MeasureSpec& target, int R,
                            std::uint64_t seed, const MCOptions& opts) {
  if (R < 2) throw Error(ErrorCode::InvalidArgument, "Monte Carlo needs R >= 2");
  if (!(process.space() == target.space())) {
    throw Error(ErrorCode::InvalidArgument, "process and target live on different spaces");
  }
  process.validate();
  const ProcessSpec proc = process.with_seed(seed);
  const bool circle_exact = target.space().kind() == SpaceKind::Circle && !target.is_atomic();
  std::vector<double> values(static_cast<std::size_t>(R), 0.0);
  std::vector<double> bands(static_cast<std::size_t>(R), 0.0);
  std::vector<char> certified(static_cast<std::size_t>(R), 1);
  std::vector<std::optional<CertificateCheck>> checks(static_cast<std::size_t>(R));
  std::vector<SampleTrace> traces(opts.observer ? static_cast<std::size_t>(R) : 0);

  auto one = [&](int r) {
    SampleTrace tr = sample(proc, static_cast<std::uint64_t>(r));
    double v;
    if (circle_exact) {
      v = w2_circle_exact(tr.points, target);
    } else {
      SemiDiscreteResult sd = w2_semidiscrete(tr.points, target, opts.semidiscrete);
      v = sd.plan.cost;
      bands[static_cast<std::size_t>(r)] = sd.error_bound;
      certified[static_cast<std::size_t>(r)] = sd.certified ? 1 : 0;
      checks[static_cast<std::size_t>(r)] = sd.certificate;
    }
    values[static_cast<std::size_t>(r)] = v;
    if (opts.observer) traces[static_cast<std::size_t>(r)] = std::move(tr);
  };

  const int threads = std::max(1, std::min(opts.threads, R));
  if (threads == 1) {
    for (int r = 0; r < R; ++r) one(r);
  } else {
    std::atomic<int> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) {
      pool.emplace_back([&]() {
        for (;;) {
          int r = next.fetch_add(1);
          if (r >= R) return;
          try {
            one(r);
          } catch (...) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (!err) err = std::current_exception();
            next.store(R);
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
  }
  MCEstimate est = summarize(values, seed);
  est.systematic_band = *std::max_element(bands.begin(), bands.end());
  est.band_certified = std::all_of(certified.begin(), certified.end(), [](char c) { return c != 0; });
  for (const auto& c : checks) {
    if (!c) continue;
    ++est.plans_verified;
    if (!c->ok) ++est.plans_failed;
    est.max_dual_violation = std::max(est.max_dual_violation, c->max_dual_violation);
  }
  if (opts.observer) {
    for (int r = 0; r < R; ++r) opts.observer(r, traces[static_cast<std::size_t>(r)], values[static_cast<std::size_t>(r)]);
  }
  return est;
}

}  // namespace w2lab
