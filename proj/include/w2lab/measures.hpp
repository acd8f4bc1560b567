#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "w2lab/common.hpp"
#include "w2lab/rng.hpp"
#include "w2lab/spectral.hpp"

namespace w2lab {

// a cos(2 pi k.x) + b sin(2 pi k.x)
struct TrigTerm {
  std::array<int, 4> k{};
  double a = 0.0;
  double b = 0.0;
};

// a * chi_n, chi_n the character of the n-dimensional irrep.
struct CentralTerm {
  int n = 1;
  double a = 0.0;
};

struct Box {
  std::array<double, 4> lo{};
  std::array<double, 4> hi{};
};

struct Uniform {};

// Density 1 + sum of terms; c is the declared pointwise lower bound.
struct MixtureDensity {
  double c = 0.0;
  std::vector<TrigTerm> terms;
  std::vector<CentralTerm> central;
};

struct Atomic {
  std::vector<Point> points;
  std::vector<double> weights;
  // Set when the atoms are the generator set for this prime.
  int lps_prime = 0;
};

// Uniform mass masses[i] on boxes[i] (torus only).
struct Islands {
  std::vector<Box> boxes;
  std::vector<double> masses;
};

class MeasureSpec {
 public:
  using Body = std::variant<Uniform, MixtureDensity, Atomic, Islands>;

  MeasureSpec(SpaceModel space, Body body) : space_(space), body_(std::move(body)) {}

  static MeasureSpec uniform(const SpaceModel& space) { return MeasureSpec(space, Uniform{}); }
  static MeasureSpec mixture(const SpaceModel& space, double c, std::vector<TrigTerm> terms);
  static MeasureSpec central_mixture(const SpaceModel& space, double c,
                                     std::vector<CentralTerm> terms);
  static MeasureSpec atomic(const SpaceModel& space, std::vector<Point> points,
                            std::vector<double> weights);
  static MeasureSpec empirical(const SpaceModel& space, const std::vector<Point>& points);
  static MeasureSpec dirac(const SpaceModel& space, const Point& p);
  static MeasureSpec islands(const SpaceModel& space, std::vector<Box> boxes,
                             std::vector<double> masses);

  const SpaceModel& space() const { return space_; }
  const Body& body() const { return body_; }
  bool is_uniform() const { return std::holds_alternative<Uniform>(body_); }
  bool is_atomic() const { return std::holds_alternative<Atomic>(body_); }
  bool is_continuous() const { return !is_atomic(); }
  const Atomic& atoms() const { return std::get<Atomic>(body_); }
  const MixtureDensity& mixture_density() const { return std::get<MixtureDensity>(body_); }
  const Islands& island_data() const { return std::get<Islands>(body_); }

  // Throws InvalidArgument or DensityViolation.
  void validate() const;
  // Density against Vol; throws for atomic measures.
  double density(const Point& x) const;
  // Pointwise density bound used as a rejection envelope.
  double density_sup() const;
  std::string describe() const;

 private:
  SpaceModel space_;
  Body body_;
};

struct IID {
  MeasureSpec mu;
};
struct Teleport {
  MeasureSpec mu;
  double theta = 1.0;
};
struct Walk {
  MeasureSpec step;
};
struct TwoIsland {
  Box a;
  Box b;
  double p = 0.5;
};

class ProcessSpec {
 public:
  using Kind = std::variant<IID, Teleport, Walk, TwoIsland>;

  ProcessSpec(SpaceModel space, Kind kind, std::int64_t n, std::uint64_t seed)
      : space_(space), kind_(std::move(kind)), n_(n), seed_(seed) {}

  static ProcessSpec iid(const MeasureSpec& mu, std::int64_t n, std::uint64_t seed);
  static ProcessSpec teleport(const MeasureSpec& mu, double theta, std::int64_t n,
                              std::uint64_t seed);
  static ProcessSpec walk(const MeasureSpec& step, std::int64_t n, std::uint64_t seed);
  // A = [0, 0.25]^d, B = A shifted by 0.5 in the first coordinate.
  static ProcessSpec two_island(const SpaceModel& space, std::int64_t n, std::uint64_t seed,
                                double p = 0.5);

  const SpaceModel& space() const { return space_; }
  const Kind& kind() const { return kind_; }
  std::int64_t length() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  ProcessSpec with_length(std::int64_t n) const;
  ProcessSpec with_seed(std::uint64_t seed) const;

  // The law the empirical measure converges to.
  MeasureSpec stationary() const;
  void validate() const;
  std::string describe() const;

 private:
  SpaceModel space_;
  Kind kind_;
  std::int64_t n_;
  std::uint64_t seed_;
};

struct SampleTrace {
  std::vector<Point> points;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  // Teleport: number of fresh draws after the first point.
  std::int64_t refreshes = 0;
};

// Uses stream 0 of the process seed.
SampleTrace sample(const ProcessSpec& process);
SampleTrace sample(const ProcessSpec& process, std::uint64_t stream);

// Draws one point from a measure.
Point draw(const MeasureSpec& mu, Rng& rng);

struct MixingBudget {
  double B_beta = 0.0;
  double B_alpha = 0.0;
  double c = 0.0;
};

MixingBudget mixing_budget(const ProcessSpec& process, std::int64_t N);
double lower_mass_constant(const MeasureSpec& measure);

// Quaternion helpers (w, x, y, z).
Point quat_mul(const Point& p, const Point& q);
Point quat_conj(const Point& p);
Point quat_normalize(const Point& p);
Point quat_pow(const Point& g, std::int64_t n);
// Rotation angle in [0, 2 pi] of the SU2 element.
double quat_angle(const Point& g);

// Circular distribution function machinery for one-dimensional transport.
class CircleLaw {
 public:
  explicit CircleLaw(const MeasureSpec& mu);

  double density(double x) const;
  // Lifted distribution function, G(y + 1) = G(y) + 1.
  double cdf(double y) const;
  // Lifted quantile: the y with cdf(y) = u.
  double quantile(double u) const;
  // Integral of (x - y)^2 dG(y) over [y0, y1].
  double moment(double x, double y0, double y1) const;
  bool is_uniform() const { return kind_ == Kind::Trig && terms_.empty(); }

 private:
  enum class Kind { Trig, Pieces };
  double cdf_unit(double y) const;
  double quantile_unit(double u) const;

  Kind kind_ = Kind::Trig;
  std::vector<TrigTerm> terms_;
  std::vector<double> lo_, hi_, height_, cum_;
};

}  // namespace w2lab
