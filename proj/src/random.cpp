#include "invldm/random.hpp"

#include <cmath>
#include <numbers>

namespace invldm {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index + kGolden));
}

std::uint64_t SeededStream::next_u64() { return mix64(seed_ + (++counter_) * kGolden); }

real_t SeededStream::uniform() {
  return std::ldexp(static_cast<real_t>((next_u64() >> 11) + 1), -53);
}

complex_t SeededStream::complex_normal() {
  const real_t r = std::sqrt(-std::log(uniform()));
  const real_t theta = 2 * std::numbers::pi * uniform();
  return {r * std::cos(theta), r * std::sin(theta)};
}

std::size_t SeededStream::index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

ComplexMatrix generate_channel(std::size_t n, std::size_t k, std::uint64_t seed) {
  SeededStream rng(seed);
  ComplexMatrix h(n, k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) h(i, j) = rng.complex_normal();
  return h;
}

}  // namespace invldm
