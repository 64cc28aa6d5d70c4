#include "rng.hpp"

#include <cmath>

namespace bl {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

std::uint64_t Rng::at(std::uint64_t counter) const {
  return mix64(seed_ + (counter + 1) * kGamma);
}

std::uint64_t Rng::next_below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Lemire's multiply-shift with the standard rejection fixup.
  while (true) {
    std::uint64_t x = next_u64();
    __uint128_t m = (__uint128_t)x * bound;
    std::uint64_t lo = (std::uint64_t)m;
    if (lo >= bound || lo >= (-bound) % bound) return (std::uint64_t)(m >> 64);
  }
}

double Rng::next_gaussian() {
  double u1 = next_double();
  double u2 = next_double();
  while (u1 <= 0.0) u1 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

std::uint64_t Rng::next_poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 30.0) {
    double l = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= next_double();
    } while (p > l);
    return k - 1;
  }
  // Split a large mean into halves; recursion depth is logarithmic.
  double half = std::floor(mean / 2.0);
  return next_poisson(half) + next_poisson(mean - half);
}

SeedLabel::SeedLabel(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a, widened through mix64
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  hash = mix64(h);
}

std::uint64_t SeedLabel::mix_int(std::uint64_t v) { return mix64(v + kGamma); }

static std::uint64_t combine(std::uint64_t acc, std::uint64_t h) {
  return mix64(acc ^ (h + kGamma + (acc << 6) + (acc >> 2)));
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<SeedLabel> labels) {
  std::uint64_t acc = mix64(master);
  for (const auto& l : labels) acc = combine(acc, l.hash);
  return acc;
}

std::uint64_t derive_seed(std::uint64_t master, const std::vector<SeedLabel>& labels) {
  std::uint64_t acc = mix64(master);
  for (const auto& l : labels) acc = combine(acc, l.hash);
  return acc;
}

}  // namespace bl
