#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace w2lab {

// Philox4x32-10 counter-based generator (Salmon et al. 2011).
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32() = default;
  Philox4x32(Key key, Counter counter) : key_(key), ctr_(counter) {}

  static Counter block(Counter ctr, Key key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();
  std::uint32_t next32();

 private:
  void refill();

  Key key_{};
  Counter ctr_{};
  Counter buf_{};
  int used_ = 4;
};

// Independent stream for (seed, stream): key = seed, high counter words = stream.
Philox4x32 make_stream(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(Philox4x32 gen) : gen_(gen) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : gen_(make_stream(seed, stream)) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1).
  double uniform_open();
  double normal();
  std::uint64_t below(std::uint64_t n);
  Philox4x32& engine() { return gen_; }

 private:
  Philox4x32 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace w2lab
