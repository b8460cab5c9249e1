#pragma once

// Small random generators for property tests, driven by the library's own
// counter-based RNG so every failure is reproducible from (seed, case).

#include <algorithm>
#include <cstdint>
#include <vector>

#include "spacinglab/random.hpp"

namespace gen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed, std::uint64_t stream = 0) : rng_(seed, stream) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(rng_.next_u64() % static_cast<std::uint64_t>(hi - lo + 1)); }
  double normal() { return rng_.normal(); }

  std::vector<double> points(int k, double lo, double hi) {
    std::vector<double> v(static_cast<std::size_t>(k));
    for (double& x : v) x = uniform(lo, hi);
    return v;
  }

  std::vector<double> sorted_points(int k, double lo, double hi) {
    auto v = points(k, lo, hi);
    std::sort(v.begin(), v.end());
    return v;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng_.next_u64() % i]);
  }

 private:
  spacinglab::rng::StreamRng rng_;
};

}  // namespace gen
