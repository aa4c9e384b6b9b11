#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace xalign {

// Seeded generator whose derived draws are fully specified (no reliance on
// implementation-defined std distributions), so outputs match across stdlibs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, n). n must be > 0.
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  // Uniform in [0, 1) with 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[index(i)]);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

// Mixes a base seed with a stream tag so related draws stay independent.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace xalign
