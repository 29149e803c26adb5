#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace vgrid {

// Counter-free deterministic RNG built on splitmix64 with a Box-Muller
// normal transform. Unlike std::normal_distribution, the draw sequence is
// fixed by this code alone, so seeded runs replay bit-identically on any
// platform and compiler.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64();

  // Uniform in (0, 1]; never returns 0 so log() is safe.
  double uniform();

  // Standard normal draw (Box-Muller, second sample cached).
  double normal();

  float normal_f() { return static_cast<float>(normal()); }

 private:
  uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

uint64_t fnv1a64(std::string_view s);

// Derives a child seed from a base seed and an ordered tag list, e.g.
// derive_seed(seed, {kStageB, t, axis, index}). Order-sensitive.
uint64_t derive_seed(uint64_t base, std::initializer_list<uint64_t> tags);

}  // namespace vgrid
