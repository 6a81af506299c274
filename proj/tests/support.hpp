#pragma once

#include <doctest.h>

#include <cstdint>

#include "invldm/matrix.hpp"
#include "invldm/random.hpp"
#include "oracles.hpp"

namespace support {

using invldm::ComplexMatrix;
using invldm::ComplexVector;

inline ComplexMatrix random_matrix(std::size_t n, std::size_t m, std::uint64_t seed) {
  return invldm::generate_channel(n, m, seed);
}

inline ComplexVector random_vector(std::size_t n, std::uint64_t seed) {
  return random_matrix(n, 1, seed).col(0);
}

/// H^H H + alpha I for a random square H.
inline ComplexMatrix random_pd(std::size_t k, double alpha, std::uint64_t seed) {
  return invldm::gram_regularized(random_matrix(k, k, seed), alpha);
}

/// Random matrix with a dominant diagonal (nonzero leading Schur complements).
inline ComplexMatrix random_dominant(std::size_t k, std::uint64_t seed) {
  ComplexMatrix r = random_matrix(k, k, seed);
  for (std::size_t i = 0; i < k; ++i) r(i, i) = r(i, i) + invldm::Complex(2.0 * static_cast<double>(k));
  return r;
}

inline double residual(const ComplexMatrix& q, const ComplexMatrix& r) {
  return oracle::inverse_residual(oracle::from(q), oracle::from(r));
}

inline double distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return oracle::max_abs_diff(oracle::from(a), oracle::from(b));
}

}  // namespace support
