#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace gpnam {

/// Portable seeded generator.
///
/// The bit stream is std::mt19937_64, which the standard pins exactly. The
/// distribution transforms are implemented here rather than taken from
/// <random>, whose distributions are implementation-defined, so a seed gives
/// the same draws on every platform and standard library:
///   - uniform(): top 53 bits of one engine word, scaled to [0, 1);
///   - normal(): Box-Muller on two uniforms, both outputs used in order;
///   - below(n): rejection sampling on the 64-bit word, no modulo bias;
///   - shuffle(): Fisher-Yates from the back using below().
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::uint64_t below(std::uint64_t n);
  bool coin() { return (next() >> 63) != 0; }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gpnam
