#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace spacinglab::rng {

using Block = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds (Salmon et al. counter-based generator).
Block philox4x32(Block counter, Key key);

// Independent random stream: key = seed, counter = (block index, stream id).
// Two generators with equal (seed, stream) produce identical sequences, and
// different streams never share a counter.
class StreamRng {
 public:
  using result_type = std::uint32_t;

  StreamRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u32(); }

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  // Standard normal (Box-Muller, second value cached).
  double normal();
  // Gamma(shape, 1), Marsaglia-Tsang.
  double gamma(double shape);
  // Chi with dof degrees of freedom: sqrt(2 Gamma(dof/2)).
  double chi(double dof);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spacinglab::rng
