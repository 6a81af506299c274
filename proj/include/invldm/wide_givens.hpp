#pragma once

#include <utility>
#include <vector>

#include "invldm/divfree.hpp"
#include "invldm/matrix.hpp"

namespace invldm {

/// 2x2 column transformation theta = [[conj(a) d_a, -b], [conj(b) d_b, a]].
/// The row (a, b) maps to (tau, 0) with tau = d_a |a|^2 + d_b |b|^2.
struct WideRotation {
  ComplexMatrix theta = ComplexMatrix(2, 2);
  Real tau{1.0};
  std::pair<std::size_t, std::size_t> target_cols{0, 1};
  /// b was already zero: theta is the identity and nothing changes.
  bool skip = false;
};

struct WideRotationResult {
  WideRotation rot;
  /// Weights of the two transformed columns, (1, d_a d_b). All other
  /// weights and delta are multiplied by tau by the caller.
  std::pair<Real, Real> new_weights;
  Real tau;
};

/// Throws InputError when a = b = 0 or a weight is not positive.
WideRotationResult make_wide_rotation(Complex a, Complex b, Real d_a, Real d_b);

/// L diag(d) L^H / delta with positive real weights and delta.
struct WeightedTriangular {
  ComplexMatrix L;
  std::vector<Real> d;
  Real delta{1.0};

  std::size_t order() const { return d.size(); }
  /// L diag(d) L^H / delta, evaluated outside any audit.
  ComplexMatrix represented() const;
};

struct BlockTriangularResult {
  WeightedTriangular w;
  ComplexVector mu;  // last column, rows 0..k-2
  Complex lambda;    // bottom-right entry
};

/// Zeroes the bottom row of L except its last entry with adjacent-column
/// wide rotations, pairs (j, j+1) swept left to right.
///
/// Expected shape: an upper-triangular L whose row p has been cyclically
/// moved to the bottom, i.e. rows 0..p-1 upper-triangular, rows p..k-2 zero
/// on and below the diagonal, bottom row zero before column p. The result is
/// [[L', mu], [0, lambda]] with L' upper-triangular; the zeros are assigned.
///
/// With the policy enabled, (delta, d) are power-of-two rescaled after every
/// rotation and each weight is brought into [0.5, 2) after the sweep, the
/// compensating shift going into its column of L. Throws InputError for a
/// malformed shape and SingularError for an all-zero bottom row.
BlockTriangularResult block_triangularize(WeightedTriangular w, RescalePolicy& policy);

}  // namespace invldm
