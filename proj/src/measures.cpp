#include "w2lab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace w2lab {

namespace {

double trig_value(const std::vector<TrigTerm>& terms, const Point& x, int d) {
  double s = 1.0;
  for (const auto& t : terms) {
    double phase = 0.0;
    for (int i = 0; i < d; ++i) phase += t.k[i] * x[i];
    phase *= kTwoPi;
    s += t.a * std::cos(phase) + t.b * std::sin(phase);
  }
  return s;
}

// chi_n at the element with w = cos(psi).
double character(int n, double psi) {
  double s = std::sin(psi);
  if (std::abs(s) < 1e-12) {
    // Limit at psi = 0 or pi.
    return psi < 1.0 ? n : ((n % 2 == 1) ? n : -n);
  }
  return std::sin(n * psi) / s;
}

double central_value(const std::vector<CentralTerm>& terms, double psi) {
  double s = 1.0;
  for (const auto& t : terms) s += t.a * character(t.n, psi);
  return s;
}

bool inside(const Box& b, const Point& x, int d) {
  for (int i = 0; i < d; ++i) {
    if (x[i] < b.lo[i] || x[i] >= b.hi[i]) return false;
  }
  return true;
}

double box_volume(const Box& b, int d) {
  double v = 1.0;
  for (int i = 0; i < d; ++i) v *= b.hi[i] - b.lo[i];
  return v;
}

void check_weights(const std::vector<double>& w, const char* what) {
  if (w.empty()) throw Error(ErrorCode::InvalidArgument, std::string(what) + ": no atoms");
  KahanSum s;
  for (double x : w) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::InvalidArgument, std::string(what) + ": weights must be positive");
    }
    s += x;
  }
  if (std::abs(s.value() - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << what << ": weights sum to " << s.value();
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
}

Point haar_point(const SpaceModel& space, Rng& rng) {
  for (;;) {
    Point q = make_point(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    if (n < 1e-8) continue;
    for (auto& v : q.c) v /= n;
    return canonical_point(space, q);
  }
}

// Samples from one measure; holds precomputed tables.
class Sampler {
 public:
  explicit Sampler(const MeasureSpec& mu) : mu_(mu) {
    const auto& body = mu.body();
    if (const auto* at = std::get_if<Atomic>(&body)) {
      cum_.resize(at->weights.size());
      std::partial_sum(at->weights.begin(), at->weights.end(), cum_.begin());
    } else if (const auto* is = std::get_if<Islands>(&body)) {
      cum_.resize(is->masses.size());
      std::partial_sum(is->masses.begin(), is->masses.end(), cum_.begin());
    } else if (std::holds_alternative<MixtureDensity>(body)) {
      if (mu.space().kind() == SpaceKind::Circle) {
        law_.emplace(mu);
      } else {
        sup_ = mu.density_sup();
        if (1.0 / sup_ < 1e-3) {
          std::ostringstream msg;
          msg << "rejection acceptance rate " << 1.0 / sup_ << " is below 1e-3 for "
              << mu.describe();
          throw Error(ErrorCode::SamplerStall, msg.str());
        }
      }
    }
  }

  Point operator()(Rng& rng) {
    const auto& space = mu_.space();
    const auto& body = mu_.body();
    if (std::holds_alternative<Uniform>(body)) return uniform_point(space, rng);
    if (const auto* at = std::get_if<Atomic>(&body)) {
      return at->points[pick(rng)];
    }
    if (const auto* is = std::get_if<Islands>(&body)) {
      const Box& b = is->boxes[pick(rng)];
      Point p;
      for (int i = 0; i < space.dim(); ++i) p[i] = b.lo[i] + (b.hi[i] - b.lo[i]) * rng.uniform();
      return p;
    }
    if (law_) return make_point(law_->quantile(rng.uniform()));
    for (;;) {
      Point x = uniform_point(space, rng);
      double u = rng.uniform() * sup_;
      ++proposals_;
      if (u < mu_.density(x)) {
        ++accepted_;
        return x;
      }
      if (proposals_ >= 10000 && static_cast<double>(accepted_) < 1e-3 * proposals_) {
        std::ostringstream msg;
        msg << "rejection sampler stalled: " << accepted_ << " accepted of " << proposals_
            << " proposals for " << mu_.describe();
        throw Error(ErrorCode::SamplerStall, msg.str());
      }
    }
  }

 private:
  static Point uniform_point(const SpaceModel& space, Rng& rng) {
    if (space.is_group()) return haar_point(space, rng);
    Point p;
    for (int i = 0; i < space.dim(); ++i) p[i] = rng.uniform();
    return p;
  }

  std::size_t pick(Rng& rng) {
    double u = rng.uniform() * cum_.back();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    std::size_t i = static_cast<std::size_t>(it - cum_.begin());
    return std::min(i, cum_.size() - 1);
  }

  const MeasureSpec& mu_;
  std::vector<double> cum_;
  std::optional<CircleLaw> law_;
  double sup_ = 1.0;
  std::int64_t proposals_ = 0;
  std::int64_t accepted_ = 0;
};

}  // namespace

MeasureSpec MeasureSpec::mixture(const SpaceModel& space, double c, std::vector<TrigTerm> terms) {
  MeasureSpec m(space, MixtureDensity{c, std::move(terms), {}});
  m.validate();
  return m;
}

MeasureSpec MeasureSpec::central_mixture(const SpaceModel& space, double c,
                                         std::vector<CentralTerm> terms) {
  MeasureSpec m(space, MixtureDensity{c, {}, std::move(terms)});
  m.validate();
  return m;
}

MeasureSpec MeasureSpec::atomic(const SpaceModel& space, std::vector<Point> points,
                                std::vector<double> weights) {
  for (auto& p : points) p = canonical_point(space, p);
  MeasureSpec m(space, Atomic{std::move(points), std::move(weights), 0});
  m.validate();
  return m;
}

MeasureSpec MeasureSpec::empirical(const SpaceModel& space, const std::vector<Point>& points) {
  std::vector<double> w(points.size(), 1.0 / static_cast<double>(points.size()));
  std::vector<Point> pts(points);
  for (auto& p : pts) p = canonical_point(space, p);
  MeasureSpec m(space, Atomic{std::move(pts), std::move(w), 0});
  // Equal weights 1/N may sum to 1 only within N eps; skip the strict check.
  return m;
}

MeasureSpec MeasureSpec::dirac(const SpaceModel& space, const Point& p) {
  return atomic(space, {p}, {1.0});
}

MeasureSpec MeasureSpec::islands(const SpaceModel& space, std::vector<Box> boxes,
                                 std::vector<double> masses) {
  MeasureSpec m(space, Islands{std::move(boxes), std::move(masses)});
  m.validate();
  return m;
}

void MeasureSpec::validate() const {
  const int d = space_.dim();
  if (const auto* mix = std::get_if<MixtureDensity>(&body_)) {
    if (!(mix->c >= 0.0 && mix->c <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "mixture constant c must lie in [0, 1]");
    }
    if (space_.is_torus()) {
      if (!mix->central.empty()) {
        throw Error(ErrorCode::InvalidArgument, "character terms need a group space");
      }
      int max_freq = 0;
      for (const auto& t : mix->terms) {
        bool zero = true;
        for (int i = 0; i < 4; ++i) {
          if (i >= d && t.k[i] != 0) {
            throw Error(ErrorCode::InvalidArgument, "frequency has too many components");
          }
          if (t.k[i] != 0) zero = false;
          max_freq = std::max(max_freq, std::abs(t.k[i]));
        }
        if (zero) throw Error(ErrorCode::InvalidArgument, "frequency 0 is fixed by normalization");
        if (!std::isfinite(t.a) || !std::isfinite(t.b)) {
          throw Error(ErrorCode::InvalidArgument, "non-finite coefficient");
        }
      }
      // Trapezoid grid; exact for the integral once it resolves every frequency.
      long long g = std::max(32, 4 * max_freq + 1);
      long long cap = d == 1 ? 1 << 20 : (d == 2 ? 2048 : (d == 3 ? 160 : 40));
      g = std::min(g, cap);
      long long total = 1;
      for (int i = 0; i < d; ++i) total *= g;
      KahanSum integral;
      double min_val = 1e300;
      for (long long idx = 0; idx < total; ++idx) {
        Point x;
        long long r = idx;
        for (int i = 0; i < d; ++i) {
          x[i] = static_cast<double>(r % g) / static_cast<double>(g);
          r /= g;
        }
        double v = trig_value(mix->terms, x, d);
        integral += v;
        min_val = std::min(min_val, v);
      }
      double mass = integral.value() / static_cast<double>(total);
      if (std::abs(mass - 1.0) > 1e-9) {
        throw Error(ErrorCode::DensityViolation, "density does not integrate to 1");
      }
      if (min_val < mix->c - 1e-9) {
        std::ostringstream msg;
        msg << "density minimum " << min_val << " is below the declared c = " << mix->c;
        throw Error(ErrorCode::DensityViolation, msg.str());
      }
    } else {
      if (!mix->terms.empty()) {
        throw Error(ErrorCode::InvalidArgument, "trigonometric terms need a torus");
      }
      for (const auto& t : mix->central) {
        if (t.n < 2) throw Error(ErrorCode::InvalidArgument, "character terms need n >= 2");
        if (space_.kind() == SpaceKind::SO3 && t.n % 2 == 0) {
          throw Error(ErrorCode::InvalidArgument, "SO3 class functions use odd n only");
        }
      }
      constexpr int kGrid = 4096;
      KahanSum integral;
      double min_val = 1e300;
      for (int i = 0; i < kGrid; ++i) {
        double psi = kPi * (i + 0.5) / kGrid;
        double v = central_value(mix->central, psi);
        integral += v * (2.0 / kPi) * std::sin(psi) * std::sin(psi) * (kPi / kGrid);
        min_val = std::min(min_val, v);
      }
      min_val = std::min({min_val, central_value(mix->central, 0.0), central_value(mix->central, kPi)});
      if (std::abs(integral.value() - 1.0) > 1e-9) {
        throw Error(ErrorCode::DensityViolation, "density does not integrate to 1");
      }
      if (min_val < mix->c - 1e-9) {
        std::ostringstream msg;
        msg << "density minimum " << min_val << " is below the declared c = " << mix->c;
        throw Error(ErrorCode::DensityViolation, msg.str());
      }
    }
  } else if (const auto* at = std::get_if<Atomic>(&body_)) {
    if (at->points.size() != at->weights.size()) {
      throw Error(ErrorCode::InvalidArgument, "atom and weight counts differ");
    }
    check_weights(at->weights, "atomic measure");
    for (const auto& p : at->points) validate_point(space_, p);
  } else if (const auto* is = std::get_if<Islands>(&body_)) {
    if (!space_.is_torus()) throw Error(ErrorCode::Unsupported, "islands need a torus");
    if (is->boxes.size() != is->masses.size()) {
      throw Error(ErrorCode::InvalidArgument, "box and mass counts differ");
    }
    check_weights(is->masses, "island masses");
    for (std::size_t i = 0; i < is->boxes.size(); ++i) {
      const Box& b = is->boxes[i];
      for (int k = 0; k < d; ++k) {
        if (!(b.lo[k] >= 0.0 && b.lo[k] < b.hi[k] && b.hi[k] <= 1.0)) {
          throw Error(ErrorCode::InvalidArgument, "island box must lie inside [0, 1)^d");
        }
      }
      for (std::size_t j = 0; j < i; ++j) {
        const Box& c = is->boxes[j];
        bool overlap = true;
        for (int k = 0; k < d; ++k) {
          if (b.hi[k] <= c.lo[k] || c.hi[k] <= b.lo[k]) overlap = false;
        }
        if (overlap) throw Error(ErrorCode::InvalidArgument, "island boxes overlap");
      }
    }
  }
}

double MeasureSpec::density(const Point& x) const {
  const int d = space_.dim();
  if (std::holds_alternative<Uniform>(body_)) return 1.0;
  if (const auto* mix = std::get_if<MixtureDensity>(&body_)) {
    if (space_.is_torus()) return trig_value(mix->terms, x, d);
    double vn = std::sqrt(x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
    return central_value(mix->central, std::atan2(vn, x[0]));
  }
  if (const auto* is = std::get_if<Islands>(&body_)) {
    Point y = canonical_point(space_, x);
    for (std::size_t i = 0; i < is->boxes.size(); ++i) {
      if (inside(is->boxes[i], y, d)) return is->masses[i] / box_volume(is->boxes[i], d);
    }
    return 0.0;
  }
  throw Error(ErrorCode::Unsupported, "atomic measures have no density");
}

double MeasureSpec::density_sup() const {
  if (std::holds_alternative<Uniform>(body_)) return 1.0;
  if (const auto* mix = std::get_if<MixtureDensity>(&body_)) {
    double s = 1.0;
    for (const auto& t : mix->terms) s += std::abs(t.a) + std::abs(t.b);
    for (const auto& t : mix->central) s += std::abs(t.a) * t.n;
    return s;
  }
  if (const auto* is = std::get_if<Islands>(&body_)) {
    double s = 0.0;
    for (std::size_t i = 0; i < is->boxes.size(); ++i) {
      s = std::max(s, is->masses[i] / box_volume(is->boxes[i], space_.dim()));
    }
    return s;
  }
  throw Error(ErrorCode::Unsupported, "atomic measures have no density");
}

std::string MeasureSpec::describe() const {
  std::ostringstream os;
  os << space_.name() << ":";
  if (std::holds_alternative<Uniform>(body_)) {
    os << "uniform";
  } else if (const auto* mix = std::get_if<MixtureDensity>(&body_)) {
    os << "mixture(c=" << mix->c << ", terms=" << mix->terms.size() + mix->central.size() << ")";
  } else if (const auto* at = std::get_if<Atomic>(&body_)) {
    os << "atomic(" << at->points.size() << ")";
  } else {
    os << "islands(" << std::get<Islands>(body_).boxes.size() << ")";
  }
  return os.str();
}

ProcessSpec ProcessSpec::iid(const MeasureSpec& mu, std::int64_t n, std::uint64_t seed) {
  return ProcessSpec(mu.space(), IID{mu}, n, seed);
}

ProcessSpec ProcessSpec::teleport(const MeasureSpec& mu, double theta, std::int64_t n,
                                  std::uint64_t seed) {
  ProcessSpec p(mu.space(), Teleport{mu, theta}, n, seed);
  p.validate();
  return p;
}

ProcessSpec ProcessSpec::walk(const MeasureSpec& step, std::int64_t n, std::uint64_t seed) {
  ProcessSpec p(step.space(), Walk{step}, n, seed);
  p.validate();
  return p;
}

ProcessSpec ProcessSpec::two_island(const SpaceModel& space, std::int64_t n, std::uint64_t seed,
                                    double p) {
  if (!space.is_torus()) throw Error(ErrorCode::Unsupported, "two-island process needs a torus");
  Box a, b;
  for (int i = 0; i < space.dim(); ++i) {
    a.lo[i] = 0.0;
    a.hi[i] = 0.25;
    b.lo[i] = 0.0;
    b.hi[i] = 0.25;
  }
  b.lo[0] = 0.5;
  b.hi[0] = 0.75;
  ProcessSpec ps(space, TwoIsland{a, b, p}, n, seed);
  ps.validate();
  return ps;
}

ProcessSpec ProcessSpec::with_length(std::int64_t n) const {
  ProcessSpec p = *this;
  p.n_ = n;
  return p;
}

ProcessSpec ProcessSpec::with_seed(std::uint64_t seed) const {
  ProcessSpec p = *this;
  p.seed_ = seed;
  return p;
}

MeasureSpec ProcessSpec::stationary() const {
  if (const auto* p = std::get_if<IID>(&kind_)) return p->mu;
  if (const auto* p = std::get_if<Teleport>(&kind_)) return p->mu;
  if (std::holds_alternative<Walk>(kind_)) return MeasureSpec::uniform(space_);
  const auto& ti = std::get<TwoIsland>(kind_);
  return MeasureSpec::islands(space_, {ti.a, ti.b}, {ti.p, 1.0 - ti.p});
}

void ProcessSpec::validate() const {
  if (n_ < 1) throw Error(ErrorCode::InvalidArgument, "process length must be at least 1");
  if (const auto* p = std::get_if<IID>(&kind_)) {
    p->mu.validate();
  } else if (const auto* p = std::get_if<Teleport>(&kind_)) {
    if (!(p->theta > 0.0 && p->theta <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "teleport theta must lie in (0, 1]");
    }
    p->mu.validate();
  } else if (const auto* p = std::get_if<Walk>(&kind_)) {
    if (!space_.is_group()) throw Error(ErrorCode::Unsupported, "walks need SU2 or SO3");
    p->step.validate();
  } else {
    const auto& ti = std::get<TwoIsland>(kind_);
    if (!(ti.p > 0.0 && ti.p < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "island mass p must lie in (0, 1)");
    }
    stationary().validate();
  }
}

std::string ProcessSpec::describe() const {
  std::ostringstream os;
  if (const auto* p = std::get_if<IID>(&kind_)) {
    os << "iid[" << p->mu.describe() << "]";
  } else if (const auto* p = std::get_if<Teleport>(&kind_)) {
    os << "teleport(theta=" << p->theta << ")[" << p->mu.describe() << "]";
  } else if (const auto* p = std::get_if<Walk>(&kind_)) {
    os << "walk[" << p->step.describe() << "]";
  } else {
    os << "two-island(p=" << std::get<TwoIsland>(kind_).p << ")[" << space_.name() << "]";
  }
  os << " N=" << n_;
  return os.str();
}

Point draw(const MeasureSpec& mu, Rng& rng) {
  Sampler s(mu);
  return s(rng);
}

SampleTrace sample(const ProcessSpec& process) { return sample(process, 0); }

SampleTrace sample(const ProcessSpec& process, std::uint64_t stream) {
  process.validate();
  Rng rng(process.seed(), stream);
  SampleTrace trace;
  trace.seed = process.seed();
  trace.stream = stream;
  const auto n = static_cast<std::size_t>(process.length());
  trace.points.reserve(n);
  const auto& space = process.space();
  const auto& kind = process.kind();
  if (const auto* p = std::get_if<IID>(&kind)) {
    Sampler s(p->mu);
    for (std::size_t i = 0; i < n; ++i) trace.points.push_back(s(rng));
  } else if (const auto* p = std::get_if<Teleport>(&kind)) {
    Sampler s(p->mu);
    Point x = s(rng);
    trace.points.push_back(x);
    for (std::size_t i = 1; i < n; ++i) {
      if (rng.uniform() < p->theta) {
        x = s(rng);
        ++trace.refreshes;
      }
      trace.points.push_back(x);
    }
  } else if (const auto* p = std::get_if<Walk>(&kind)) {
    Sampler s(p->step);
    Point g = make_point(1.0);
    for (std::size_t i = 0; i < n; ++i) {
      g = quat_normalize(quat_mul(g, s(rng)));
      trace.points.push_back(canonical_point(space, g));
    }
  } else {
    const auto& ti = std::get<TwoIsland>(kind);
    for (std::size_t i = 0; i < n; ++i) {
      const Box& b = rng.uniform() < ti.p ? ti.a : ti.b;
      Point x;
      for (int k = 0; k < space.dim(); ++k) x[k] = b.lo[k] + (b.hi[k] - b.lo[k]) * rng.uniform();
      trace.points.push_back(x);
    }
  }
  return trace;
}

MixingBudget mixing_budget(const ProcessSpec& process, std::int64_t N) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be positive");
  const auto& kind = process.kind();
  if (const auto* p = std::get_if<IID>(&kind)) {
    return {0.0, 0.0, lower_mass_constant(p->mu)};
  }
  if (const auto* p = std::get_if<Teleport>(&kind)) {
    double b = (1.0 - p->theta) / p->theta;
    return {b, 0.5 * b, lower_mass_constant(p->mu)};
  }
  throw Error(ErrorCode::Unsupported, "mixing budgets exist for iid and teleport processes only");
}

double lower_mass_constant(const MeasureSpec& measure) {
  const auto& body = measure.body();
  if (std::holds_alternative<Uniform>(body)) return 1.0;
  if (const auto* mix = std::get_if<MixtureDensity>(&body)) {
    measure.validate();
    return mix->c;
  }
  return 0.0;
}

Point quat_mul(const Point& p, const Point& q) {
  return make_point(p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
                    p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
                    p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
                    p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0]);
}

Point quat_conj(const Point& p) { return make_point(p[0], -p[1], -p[2], -p[3]); }

Point quat_normalize(const Point& p) {
  double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]);
  return make_point(p[0] / n, p[1] / n, p[2] / n, p[3] / n);
}

Point quat_pow(const Point& g, std::int64_t n) {
  Point r = make_point(1.0);
  for (std::int64_t i = 0; i < n; ++i) r = quat_normalize(quat_mul(r, g));
  return r;
}

double quat_angle(const Point& g) {
  double vn = std::sqrt(g[1] * g[1] + g[2] * g[2] + g[3] * g[3]);
  return 2.0 * std::atan2(vn, g[0]);
}

CircleLaw::CircleLaw(const MeasureSpec& mu) {
  if (mu.space().kind() != SpaceKind::Circle) {
    throw Error(ErrorCode::Unsupported, "circle law needs the circle");
  }
  const auto& body = mu.body();
  if (std::holds_alternative<Uniform>(body)) {
    kind_ = Kind::Trig;
  } else if (const auto* mix = std::get_if<MixtureDensity>(&body)) {
    kind_ = Kind::Trig;
    terms_ = mix->terms;
  } else if (const auto* is = std::get_if<Islands>(&body)) {
    kind_ = Kind::Pieces;
    std::vector<std::size_t> order(is->boxes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return is->boxes[i].lo[0] < is->boxes[j].lo[0]; });
    double c = 0.0;
    for (std::size_t i : order) {
      const Box& b = is->boxes[i];
      lo_.push_back(b.lo[0]);
      hi_.push_back(b.hi[0]);
      height_.push_back(is->masses[i] / (b.hi[0] - b.lo[0]));
      cum_.push_back(c);
      c += is->masses[i];
    }
    cum_.push_back(1.0);
  } else {
    throw Error(ErrorCode::Unsupported, "circle law needs an absolutely continuous measure");
  }
}

double CircleLaw::density(double x) const {
  x -= std::floor(x);
  if (kind_ == Kind::Trig) return trig_value(terms_, make_point(x), 1);
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (x >= lo_[i] && x < hi_[i]) return height_[i];
  }
  return 0.0;
}

double CircleLaw::cdf_unit(double y) const {
  if (kind_ == Kind::Trig) {
    double g = y;
    for (const auto& t : terms_) {
      double w = kTwoPi * t.k[0];
      g += t.a * std::sin(w * y) / w + t.b * (1.0 - std::cos(w * y)) / w;
    }
    return g;
  }
  double g = 0.0;
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (y >= hi_[i]) {
      g = cum_[i + 1];
    } else if (y > lo_[i]) {
      g = cum_[i] + height_[i] * (y - lo_[i]);
      break;
    } else {
      g = cum_[i];
      break;
    }
  }
  return g;
}

double CircleLaw::cdf(double y) const {
  double f = std::floor(y);
  return f + cdf_unit(y - f);
}

double CircleLaw::quantile_unit(double u) const {
  if (kind_ == Kind::Trig) {
    if (terms_.empty()) return u;
    double lo = 0.0, hi = 1.0, y = u;
    for (int it = 0; it < 200; ++it) {
      double g = cdf_unit(y) - u;
      if (g == 0.0) return y;
      if (g > 0.0) {
        hi = y;
      } else {
        lo = y;
      }
      if (hi - lo < 1e-16) break;
      double f = density(y);
      double next = f > 0.0 ? y - g / f : lo - 1.0;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - y) < 1e-17) return next;
      y = next;
    }
    return 0.5 * (lo + hi);
  }
  std::size_t n = lo_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (u < cum_[i + 1]) return lo_[i] + (u - cum_[i]) / height_[i];
  }
  return hi_[n - 1];
}

double CircleLaw::quantile(double u) const {
  double f = std::floor(u);
  return f + quantile_unit(u - f);
}

double CircleLaw::moment(double x, double y0, double y1) const {
  if (y1 <= y0) return 0.0;
  if (kind_ == Kind::Trig) {
    double s0 = y0 - x, s1 = y1 - x;
    double m = (s1 * s1 * s1 - s0 * s0 * s0) / 3.0;
    for (const auto& t : terms_) {
      double w = kTwoPi * t.k[0];
      double phi = w * x;
      auto prim_cos = [&](double s) {
        double a = w * s + phi;
        return s * s * std::sin(a) / w + 2.0 * s * std::cos(a) / (w * w) -
               2.0 * std::sin(a) / (w * w * w);
      };
      auto prim_sin = [&](double s) {
        double a = w * s + phi;
        return -s * s * std::cos(a) / w + 2.0 * s * std::sin(a) / (w * w) +
               2.0 * std::cos(a) / (w * w * w);
      };
      m += t.a * (prim_cos(s1) - prim_cos(s0)) + t.b * (prim_sin(s1) - prim_sin(s0));
    }
    return m;
  }
  double m = 0.0;
  for (double k = std::floor(y0); k <= std::floor(y1); k += 1.0) {
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      double a = std::max(y0, k + lo_[i]);
      double b = std::min(y1, k + hi_[i]);
      if (b <= a) continue;
      double sa = a - x, sb = b - x;
      m += height_[i] * (sb * sb * sb - sa * sa * sa) / 3.0;
    }
  }
  return m;
}

}  // namespace w2lab
