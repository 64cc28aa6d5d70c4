#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace bl {

// Counter-mode SplitMix64. Output i is mix64(seed + (i+1)*GAMMA), so the
// stream is a pure function of (seed, counter) and can be split or replayed
// at any offset. This is the single generator used everywhere in the lab.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), counter_(0) {}

  std::uint64_t next_u64() { return at(counter_++); }

  // Value of the stream at an absolute counter position, without advancing.
  std::uint64_t at(std::uint64_t counter) const;

  // Uniform on [0,1), 53 mantissa bits.
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound). Rejection-free Lemire reduction.
  std::uint64_t next_below(std::uint64_t bound);

  // Standard normal via Box-Muller on two fresh uniforms.
  double next_gaussian();

  // Poisson; inversion for small mean, PTRS-style normal splitting for large.
  std::uint64_t next_poisson(double mean);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

// A label in a seed-derivation tuple: either text or an integer.
struct SeedLabel {
  SeedLabel(std::string_view s);
  SeedLabel(const char* s) : SeedLabel(std::string_view(s)) {}
  template <typename T, typename = std::enable_if_t<std::is_integral_v<T>>>
  SeedLabel(T v) : hash(mix_int(std::uint64_t(v))) {}

  std::uint64_t hash;

  static std::uint64_t mix_int(std::uint64_t v);
};

// Stable derivation of a child seed from (master, labels...). Distinct label
// tuples map to distinct seeds except for 64-bit hash collisions, which the
// experiment harness counts at runtime.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<SeedLabel> labels);
std::uint64_t derive_seed(std::uint64_t master, const std::vector<SeedLabel>& labels);

}  // namespace bl
