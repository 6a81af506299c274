#pragma once

// Independent reference computations for tests. Plain std::complex
// arithmetic throughout, no shared code with the library's kernels.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "invldm/matrix.hpp"

namespace oracle {

using cd = std::complex<double>;

/// Dense row-major matrix of plain complex doubles.
struct Mat {
  std::size_t n = 0, m = 0;
  std::vector<cd> a;

  Mat() = default;
  Mat(std::size_t rows, std::size_t cols) : n(rows), m(cols), a(rows * cols) {}
  cd& operator()(std::size_t i, std::size_t j) { return a[i * m + j]; }
  cd operator()(std::size_t i, std::size_t j) const { return a[i * m + j]; }

  static Mat eye(std::size_t n) {
    Mat r(n, n);
    for (std::size_t i = 0; i < n; ++i) r(i, i) = 1;
    return r;
  }
};

inline Mat from(const invldm::ComplexMatrix& x) {
  Mat r(x.rows(), x.cols());
  for (std::size_t i = 0; i < r.n; ++i)
    for (std::size_t j = 0; j < r.m; ++j) r(i, j) = x(i, j).value();
  return r;
}

inline invldm::ComplexMatrix to_library(const Mat& x) {
  invldm::ComplexMatrix r(x.n, x.m);
  for (std::size_t i = 0; i < x.n; ++i)
    for (std::size_t j = 0; j < x.m; ++j) r(i, j) = x(i, j);
  return r;
}

inline Mat matmul(const Mat& x, const Mat& y) {
  Mat r(x.n, y.m);
  for (std::size_t i = 0; i < x.n; ++i)
    for (std::size_t k = 0; k < x.m; ++k)
      for (std::size_t j = 0; j < y.m; ++j) r(i, j) += x(i, k) * y(k, j);
  return r;
}

inline Mat adjoint(const Mat& x) {
  Mat r(x.m, x.n);
  for (std::size_t i = 0; i < x.n; ++i)
    for (std::size_t j = 0; j < x.m; ++j) r(j, i) = std::conj(x(i, j));
  return r;
}

/// H^H H + alpha I by the triple loop.
inline Mat gram(const Mat& h, double alpha) {
  Mat r(h.m, h.m);
  for (std::size_t i = 0; i < h.m; ++i)
    for (std::size_t j = 0; j < h.m; ++j) {
      cd s = 0;
      for (std::size_t k = 0; k < h.n; ++k) s += std::conj(h(k, i)) * h(k, j);
      r(i, j) = s + (i == j ? alpha : 0.0);
    }
  return r;
}

/// Gauss-Jordan with partial pivoting on [A | I].
inline Mat inverse(const Mat& x) {
  const std::size_t n = x.n;
  Mat a = x, inv = Mat::eye(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    if (std::abs(a(piv, c)) == 0) throw std::runtime_error("oracle::inverse: singular");
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a(c, j), a(piv, j));
      std::swap(inv(c, j), inv(piv, j));
    }
    const cd p = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= p;
      inv(c, j) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const cd f = a(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

/// Closed form [[a, b], [c, d]]^-1 = [[d, -b], [-c, a]] / (ad - bc).
inline Mat inverse_2x2(cd a, cd b, cd c, cd d) {
  const cd det = a * d - b * c;
  Mat r(2, 2);
  r(0, 0) = d / det;
  r(0, 1) = -b / det;
  r(1, 0) = -c / det;
  r(1, 1) = a / det;
  return r;
}

/// L diag(w) M^H / delta.
inline Mat weighted_form(const Mat& l, const std::vector<cd>& w, const Mat& m, cd delta) {
  Mat r(l.n, m.n);
  for (std::size_t i = 0; i < l.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) {
      cd s = 0;
      for (std::size_t k = 0; k < w.size(); ++k) s += l(i, k) * w[k] * std::conj(m(j, k));
      r(i, j) = s / delta;
    }
  return r;
}

inline double frobenius(const Mat& x) {
  double s = 0;
  for (const cd& v : x.a) s += std::norm(v);
  return std::sqrt(s);
}

inline double frobenius_diff(const Mat& x, const Mat& y) {
  double s = 0;
  for (std::size_t i = 0; i < x.a.size(); ++i) s += std::norm(x.a[i] - y.a[i]);
  return std::sqrt(s);
}

inline double max_abs_diff(const Mat& x, const Mat& y) {
  double s = 0;
  for (std::size_t i = 0; i < x.a.size(); ++i) s = std::max(s, std::abs(x.a[i] - y.a[i]));
  return s;
}

/// ||X Y - I||_F.
inline double inverse_residual(const Mat& x, const Mat& y) {
  return frobenius_diff(matmul(x, y), Mat::eye(x.n));
}

/// Columns `cols` of h.
inline Mat columns(const Mat& h, const std::vector<std::size_t>& cols) {
  Mat r(h.n, cols.size());
  for (std::size_t i = 0; i < h.n; ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) r(i, j) = h(i, cols[j]);
  return r;
}

/// Rows and columns `idx` of r.
inline Mat principal(const Mat& r, const std::vector<std::size_t>& idx) {
  Mat s(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) s(i, j) = r(idx[i], idx[j]);
  return s;
}

/// Test input: Hermitian PD U^H P U with U unit upper-bidiagonal
/// (unit-modulus superdiagonal) and power-of-two pivots P chosen so that the
/// division-free denominator, which squares at every step, alternates
/// between 8 and 1/8 when not rescaled. It stays representable over long
/// chains while leaving the rescaling window at every step.
inline Mat controlled_pivot_matrix(std::size_t k) {
  std::vector<double> p(k);
  p[0] = 8;
  for (std::size_t i = 1; i < k; ++i) p[i] = std::ldexp(1.0, i % 2 ? -9 : 9);
  const cd units[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  Mat r(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    r(i, i) = p[i] + (i ? p[i - 1] : 0.0);
    if (i) {
      r(i - 1, i) = p[i - 1] * units[i % 4];
      r(i, i - 1) = std::conj(r(i - 1, i));
    }
  }
  return r;
}

struct OsicOutcome {
  std::vector<std::size_t> order;
  std::vector<std::size_t> symbols;  // by stream
  double min_gap = INFINITY;
};

/// MMSE OSIC from scratch: invert the Gram matrix of the undetected
/// columns each step, detect the smallest diagonal, slice to the nearest
/// point (first on ties), cancel.
inline OsicOutcome osic(const Mat& h, std::vector<cd> x, double alpha,
                        const std::vector<cd>& points) {
  OsicOutcome out;
  out.symbols.assign(h.m, 0);
  std::vector<std::size_t> left(h.m);
  for (std::size_t i = 0; i < h.m; ++i) left[i] = i;
  while (!left.empty()) {
    const Mat hs = columns(h, left);
    const Mat q = inverse(gram(hs, alpha));
    std::size_t p = 0;
    for (std::size_t i = 1; i < left.size(); ++i)
      if (q(i, i).real() < q(p, p).real()) p = i;
    for (std::size_t i = 0; i < left.size(); ++i)
      if (i != p) out.min_gap = std::min(out.min_gap, q(i, i).real() - q(p, p).real());
    cd est = 0;
    for (std::size_t j = 0; j < left.size(); ++j) {
      cd y = 0;
      for (std::size_t n = 0; n < h.n; ++n) y += std::conj(hs(n, j)) * x[n];
      est += q(p, j) * y;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i)
      if (std::abs(est - points[i]) < std::abs(est - points[best])) best = i;
    const std::size_t s = left[p];
    for (std::size_t n = 0; n < h.n; ++n) x[n] -= h(n, s) * points[best];
    out.order.push_back(s);
    out.symbols[s] = best;
    left.erase(left.begin() + static_cast<std::ptrdiff_t>(p));
  }
  return out;
}

}  // namespace oracle
