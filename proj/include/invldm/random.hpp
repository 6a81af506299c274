#pragma once

#include <cstdint>

#include "invldm/matrix.hpp"

namespace invldm {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Per-item seed derived from a master seed and an index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Counter-based generator: draw n is mix64(seed + n * golden). The
/// sequence depends only on the seed, on every platform.
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  /// ((x >> 11) + 1) 2^-53, uniform on (0, 1].
  real_t uniform();
  /// Circular complex Gaussian with unit variance: sqrt(-ln u1) e^{2 pi i u2}.
  complex_t complex_normal();
  /// Uniform on {0, ..., n - 1}.
  std::size_t index(std::size_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// N x K i.i.d. unit-variance circular Gaussian entries, row-major draws.
ComplexMatrix generate_channel(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace invldm
