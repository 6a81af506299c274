#pragma once

// Products with upper-triangular factors that touch only the stored
// triangle. With `unit` set the diagonal is taken as 1 and never multiplied.

#include "invldm/matrix.hpp"

namespace invldm::tri {

/// U X for upper-triangular U.
inline ComplexMatrix upper_times(const ComplexMatrix& u, const ComplexMatrix& x, bool unit) {
  const std::size_t n = u.rows();
  ComplexMatrix y(n, x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      Complex acc = unit ? x(i, c) : u(i, i) * x(i, c);
      for (std::size_t m = i + 1; m < n; ++m) acc += u(i, m) * x(m, c);
      y(i, c) = acc;
    }
  }
  return y;
}

/// U^H X for upper-triangular U.
inline ComplexMatrix upper_adjoint_times(const ComplexMatrix& u, const ComplexMatrix& x,
                                         bool unit) {
  const std::size_t n = u.rows();
  ComplexMatrix y(n, x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc = unit ? x(j, c) : conj(u(j, j)) * x(j, c);
      for (std::size_t m = 0; m < j; ++m) acc += conj(u(m, j)) * x(m, c);
      y(j, c) = acc;
    }
  }
  return y;
}

/// X U for upper-triangular U.
inline ComplexMatrix times_upper(const ComplexMatrix& x, const ComplexMatrix& u, bool unit) {
  const std::size_t n = u.rows();
  ComplexMatrix y(x.rows(), n);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc = unit ? x(r, j) : x(r, j) * u(j, j);
      for (std::size_t m = 0; m < j; ++m) acc += x(r, m) * u(m, j);
      y(r, j) = acc;
    }
  }
  return y;
}

/// X U^H for upper-triangular U.
inline ComplexMatrix times_upper_adjoint(const ComplexMatrix& x, const ComplexMatrix& u,
                                         bool unit) {
  const std::size_t n = u.rows();
  ComplexMatrix y(x.rows(), n);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc = unit ? x(r, j) : x(r, j) * conj(u(j, j));
      for (std::size_t m = j + 1; m < n; ++m) acc += x(r, m) * conj(u(j, m));
      y(r, j) = acc;
    }
  }
  return y;
}

/// L X for lower-triangular L (non-unit).
inline ComplexMatrix lower_times(const ComplexMatrix& l, const ComplexMatrix& x) {
  const std::size_t n = l.rows();
  ComplexMatrix y(n, x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      Complex acc = l(i, 0) * x(0, c);
      for (std::size_t m = 1; m <= i; ++m) acc += l(i, m) * x(m, c);
      y(i, c) = acc;
    }
  }
  return y;
}

/// X L for lower-triangular L (non-unit).
inline ComplexMatrix times_lower(const ComplexMatrix& x, const ComplexMatrix& l) {
  const std::size_t n = l.rows();
  ComplexMatrix y(x.rows(), n);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc = x(r, j) * l(j, j);
      for (std::size_t m = j + 1; m < n; ++m) acc += x(r, m) * l(m, j);
      y(r, j) = acc;
    }
  }
  return y;
}

/// diag(d) X.
inline ComplexMatrix diag_times(std::span<const Complex> d, const ComplexMatrix& x) {
  ComplexMatrix y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t c = 0; c < x.cols(); ++c) y(i, c) = d[i] * x(i, c);
  return y;
}

/// X diag(d).
inline ComplexMatrix times_diag(const ComplexMatrix& x, std::span<const Complex> d) {
  ComplexMatrix y(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t j = 0; j < x.cols(); ++j) y(r, j) = x(r, j) * d[j];
  return y;
}

inline ComplexMatrix negate(ComplexMatrix x) {
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) = -x(r, c);
  return x;
}

}  // namespace invldm::tri
