#pragma once

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "invldm/scalar.hpp"

namespace invldm {

using ComplexVector = std::vector<Complex>;

/// Dense row-major matrix of counted complex scalars.
class ComplexMatrix {
 public:
  /// Zero-filled rows x cols; both must be at least 1.
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::initializer_list<std::initializer_list<complex_t>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix column(std::span<const Complex> v);
  static ComplexMatrix diagonal(std::span<const Complex> d);

  /// Hermitian-flagged copy of (a + a^H)/2. Throws InputError when a is not
  /// square or its relative Frobenius asymmetry exceeds 1e-10.
  static ComplexMatrix hermitian(const ComplexMatrix& a);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool is_hermitian() const { return hermitian_; }

  const Complex& operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  // Mutable access drops the Hermitian flag.
  Complex& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    hermitian_ = false;
    return data_[r * cols_ + c];
  }
  const Complex& at(std::size_t r, std::size_t c) const;
  Complex& at(std::size_t r, std::size_t c);

  std::span<const Complex> data() const { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const ComplexMatrix& b);
  ComplexVector col(std::size_t c) const;

  friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Complex> data_;
  bool hermitian_ = false;
};

/// The 2x2 block view of a square matrix split at k: [[R_k, V], [Y^H, T]].
struct BlockPartition {
  ComplexMatrix top_left;       // k x k
  ComplexMatrix top_right;      // k x i
  ComplexMatrix bottom_left_h;  // i x k, stored as Y^H
  ComplexMatrix bottom_right;   // i x i
};

// Counted arithmetic. Inner products start from the first term, so an
// n-term sum costs n multiplies and n-1 adds.
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector multiply(const ComplexMatrix& a, std::span<const Complex> x);
ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix subtract(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix scale(const ComplexMatrix& a, Complex s);

/// R = H^H H + alpha I, Hermitian-flagged.
ComplexMatrix gram_regularized(const ComplexMatrix& h, real_t alpha);

BlockPartition partition(const ComplexMatrix& r, std::size_t k);
ComplexMatrix reassemble(const BlockPartition& p);

struct AppendedColumn {
  ComplexVector v;  // H_k^H h_next
  Real t;           // h_next^H h_next + alpha
};

/// New last column of R_{k+1} when column h_next is appended to H_k.
AppendedColumn append_column_blocks(const ComplexMatrix& h_k, std::span<const Complex> h_next,
                                    real_t alpha);

/// Gauss-Jordan inverse with partial pivoting. Throws SingularError.
ComplexMatrix dense_inverse(const ComplexMatrix& a);

// Uncounted norms for checks and reporting.
real_t frobenius_norm(const ComplexMatrix& a);
real_t inf_norm(const ComplexMatrix& a);
real_t max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
real_t frobenius_diff(const ComplexMatrix& a, const ComplexMatrix& b);
/// ||a b - I||_F, computed without counting.
real_t inverse_residual(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace invldm
