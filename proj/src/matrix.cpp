#include "invldm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "invldm/errors.hpp"

namespace invldm {

namespace {

std::string shape(const ComplexMatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shapes " + shape(a) + " and " + shape(b) +
                         " differ");
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {
  if (rows == 0 || cols == 0) throw DimensionError("matrix dimensions must be at least 1");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<complex_t>> rows)
    : ComplexMatrix(rows.size(), rows.size() ? rows.begin()->size() : 0) {
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionError("ragged matrix initializer");
    std::size_t c = 0;
    for (const auto& v : row) data_[r * cols_ + c++] = Complex(v);
    ++r;
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Complex(1.0);
  m.hermitian_ = true;
  return m;
}

ComplexMatrix ComplexMatrix::column(std::span<const Complex> v) {
  ComplexMatrix m(v.size(), 1);
  std::copy(v.begin(), v.end(), m.data_.begin());
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::hermitian(const ComplexMatrix& a) {
  if (!a.is_square()) throw InputError("Hermitian matrix must be square, got " + shape(a));
  const std::size_t n = a.rows();
  real_t asym = 0;
  real_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const complex_t aij = a(i, j).value();
      asym += std::norm(aij - std::conj(a(j, i).value()));
      total += std::norm(aij);
    }
  }
  if (std::sqrt(asym) > 1e-10 * std::max(std::sqrt(total), real_t{1e-300})) {
    throw InputError("matrix is not Hermitian to 1e-10 relative Frobenius");
  }
  // Symmetrized in raw arithmetic: construction plumbing, not algorithm work.
  ComplexMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    h(i, i) = Complex(a(i, i).re());
    for (std::size_t j = i + 1; j < n; ++j) {
      const complex_t v = 0.5 * (a(i, j).value() + std::conj(a(j, i).value()));
      h(i, j) = Complex(v);
      h(j, i) = Complex(std::conj(v));
    }
  }
  h.hermitian_ = true;
  return h;
}

const Complex& ComplexMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) {
    throw DimensionError("index (" + std::to_string(r) + "," + std::to_string(c) +
                         ") outside " + shape(*this));
  }
  return data_[r * cols_ + c];
}

Complex& ComplexMatrix::at(std::size_t r, std::size_t c) {
  static_cast<const ComplexMatrix&>(*this).at(r, c);
  hermitian_ = false;
  return data_[r * cols_ + c];
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t.data_[c * rows_ + r] = conj((*this)(r, c));
  t.hermitian_ = hermitian_;
  return t;
}

ComplexMatrix ComplexMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr,
                                   std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) {
    throw DimensionError("block outside " + shape(*this));
  }
  ComplexMatrix b(nr, nc);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) b.data_[r * nc + c] = (*this)(r0 + r, c0 + c);
  return b;
}

void ComplexMatrix::set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& b) {
  if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) {
    throw DimensionError("block " + shape(b) + " does not fit in " + shape(*this));
  }
  hermitian_ = false;
  for (std::size_t r = 0; r < b.rows_; ++r)
    for (std::size_t c = 0; c < b.cols_; ++c) data_[(r0 + r) * cols_ + c0 + c] = b(r, c);
}

ComplexVector ComplexMatrix::col(std::size_t c) const {
  if (c >= cols_) throw DimensionError("column index outside " + shape(*this));
  ComplexVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("multiply: " + shape(a) + " times " + shape(b));
  }
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Complex acc = a(i, 0) * b(0, j);
      for (std::size_t m = 1; m < a.cols(); ++m) acc += a(i, m) * b(m, j);
      c(i, j) = acc;
    }
  }
  return c;
}

ComplexVector multiply(const ComplexMatrix& a, std::span<const Complex> x) {
  if (a.cols() != x.size()) {
    throw DimensionError("multiply: " + shape(a) + " times vector of length " +
                         std::to_string(x.size()));
  }
  ComplexVector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex acc = a(i, 0) * x[0];
    for (std::size_t m = 1; m < a.cols(); ++m) acc += a(i, m) * x[m];
    y[i] = acc;
  }
  return y;
}

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "add");
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

ComplexMatrix subtract(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "subtract");
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

ComplexMatrix scale(const ComplexMatrix& a, Complex s) {
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) * s;
  return c;
}

ComplexMatrix gram_regularized(const ComplexMatrix& h, real_t alpha) {
  const std::size_t n = h.rows();
  const std::size_t k = h.cols();
  if (n < k) {
    throw DimensionError("gram_regularized: need N >= K, got " + shape(h));
  }
  if (!(alpha >= 0)) throw InputError("gram_regularized: alpha must be nonnegative");
  ComplexMatrix r(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      Complex acc = conj(h(0, i)) * h(0, j);
      for (std::size_t m = 1; m < n; ++m) acc += conj(h(m, i)) * h(m, j);
      if (i == j) acc += Real(alpha);
      r(i, j) = acc;
      r(j, i) = conj(acc);
    }
  }
  // conj(z) z has an exactly zero imaginary part, so r is exactly Hermitian.
  return ComplexMatrix::hermitian(r);
}

BlockPartition partition(const ComplexMatrix& r, std::size_t k) {
  if (!r.is_square()) throw DimensionError("partition: matrix must be square");
  const std::size_t n = r.rows();
  if (k < 1 || k >= n) {
    throw DimensionError("partition: k=" + std::to_string(k) + " outside [1, " +
                         std::to_string(n - 1) + "]");
  }
  const std::size_t i = n - k;
  return {r.block(0, 0, k, k), r.block(0, k, k, i), r.block(k, 0, i, k), r.block(k, k, i, i)};
}

ComplexMatrix reassemble(const BlockPartition& p) {
  const std::size_t k = p.top_left.rows();
  const std::size_t i = p.bottom_right.rows();
  if (!p.top_left.is_square() || !p.bottom_right.is_square() || p.top_right.rows() != k ||
      p.top_right.cols() != i || p.bottom_left_h.rows() != i || p.bottom_left_h.cols() != k) {
    throw DimensionError("reassemble: inconsistent block shapes");
  }
  ComplexMatrix r(k + i, k + i);
  r.set_block(0, 0, p.top_left);
  r.set_block(0, k, p.top_right);
  r.set_block(k, 0, p.bottom_left_h);
  r.set_block(k, k, p.bottom_right);
  return r;
}

AppendedColumn append_column_blocks(const ComplexMatrix& h_k, std::span<const Complex> h_next,
                                    real_t alpha) {
  const std::size_t n = h_k.rows();
  if (h_next.size() != n) {
    throw DimensionError("append_column_blocks: column has " + std::to_string(h_next.size()) +
                         " rows, H_k has " + std::to_string(n));
  }
  AppendedColumn out{ComplexVector(h_k.cols()), Real(0)};
  for (std::size_t j = 0; j < h_k.cols(); ++j) {
    Complex acc = conj(h_k(0, j)) * h_next[0];
    for (std::size_t m = 1; m < n; ++m) acc += conj(h_k(m, j)) * h_next[m];
    out.v[j] = acc;
  }
  Complex t = conj(h_next[0]) * h_next[0];
  for (std::size_t m = 1; m < n; ++m) t += conj(h_next[m]) * h_next[m];
  t += Real(alpha);
  if (std::abs(t.im()) > 1e-12 * magnitude(t)) {
    throw InputError("append_column_blocks: h^H h + alpha has a non-negligible imaginary part");
  }
  out.t = real(t);
  return out;
}

ComplexMatrix dense_inverse(const ComplexMatrix& a) {
  if (!a.is_square()) throw DimensionError("dense_inverse: matrix must be square");
  const std::size_t n = a.rows();
  const real_t tol = 1e-13 * std::max<real_t>(1, inf_norm(a));
  ComplexMatrix work = a;
  ComplexMatrix inv = ComplexMatrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (magnitude(work(r, k)) > magnitude(work(piv, k))) piv = r;
    if (magnitude(work(piv, k)) <= tol) throw SingularError("dense_inverse: singular matrix");
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(work(k, c), work(piv, c));
        std::swap(inv(k, c), inv(piv, c));
      }
    }
    const Complex p = Complex(1.0) / work(k, k);
    for (std::size_t c = 0; c < n; ++c) {
      work(k, c) *= p;
      inv(k, c) *= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == k) continue;
      const Complex f = work(r, k);
      if (f == Complex()) continue;
      for (std::size_t c = 0; c < n; ++c) {
        work(r, c) -= f * work(k, c);
        inv(r, c) -= f * inv(k, c);
      }
    }
  }
  return inv;
}

real_t frobenius_norm(const ComplexMatrix& a) {
  real_t s = 0;
  for (const Complex& z : a.data()) s += std::norm(z.value());
  return std::sqrt(s);
}

real_t inf_norm(const ComplexMatrix& a) {
  real_t best = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    real_t s = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += magnitude(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

real_t max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  real_t m = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(a.data()[i].value() - b.data()[i].value()));
  return m;
}

real_t frobenius_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "frobenius_diff");
  real_t s = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    s += std::norm(a.data()[i].value() - b.data()[i].value());
  return std::sqrt(s);
}

real_t inverse_residual(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) {
    throw DimensionError("inverse_residual: " + shape(a) + " times " + shape(b));
  }
  real_t s = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      complex_t acc = 0;
      for (std::size_t m = 0; m < a.cols(); ++m) acc += a(i, m).value() * b(m, j).value();
      if (i == j) acc -= 1.0;
      s += std::norm(acc);
    }
  }
  return std::sqrt(s);
}

}  // namespace invldm
