#pragma once

#include <iosfwd>
#include <optional>
#include <span>

#include "invldm/matrix.hpp"

namespace invldm {

/// Scaled inverse factors  Lt (Dt / delta) Mt^H = R^-1, built with
/// multiplications and additions only.
///
/// Lt and Mt are upper-triangular. Their diagonals are not normalized: the
/// entry added at step j is the denominator delta_{j-1} of the previous
/// order (1 for the first). Column j of Lt is therefore delta_{j-1} times the
/// corresponding unit-diagonal column of the division-using factors.
///
/// When the factors come from a Hermitian matrix, Mt is not stored and
/// aliases Lt; Dt and delta are then real and delta > 0.
struct DivFreeFactors {
  ComplexMatrix lt;
  ComplexVector dt;
  std::optional<ComplexMatrix> mt_general;
  Complex delta;
  /// Running log2 of the product of all rescaling factors applied.
  int accumulated_shift = 0;

  bool hermitian() const { return !mt_general.has_value(); }
  const ComplexMatrix& mt() const { return mt_general ? *mt_general : lt; }
  std::size_t order() const { return dt.size(); }
};

/// Power-of-two rescaling of (delta, Dt).
struct RescalePolicy {
  bool enabled = true;
  int accumulated_shift = 0;
};

/// Window kept for |delta|^2 when rescaling.
inline constexpr real_t kDeltaNormSqMin = 0.25;
inline constexpr real_t kDeltaNormSqMax = 4.0;

/// Exponent e such that delta * 2^e is the rescaled denominator: 0 when
/// |delta|^2 is already inside [0.25, 4], otherwise the e placing |delta 2^e|
/// in (1, 2]. Computed from the exponent bits, no arithmetic is counted.
int rescale_exponent(Complex delta);

/// Lt = Mt = [1], Dt = [1], delta = r11. Throws SingularError for r11 = 0.
DivFreeFactors divfree_init(Complex r11, bool hermitian = false);

/// Appends one row and column: R_{k+1} = [[R_k, v], [y^H, t]].
/// eta = delta t - y^H Lt Dt Mt^H v; no division and no square root.
/// Hermitian factors stay Hermitian only through divfree_extend_hermitian.
DivFreeFactors divfree_extend_vector(const DivFreeFactors& f, std::span<const Complex> v,
                                     std::span<const Complex> y, Complex t,
                                     std::optional<real_t> norm_ref = std::nullopt);

/// Hermitian case of divfree_extend_vector (y = v, real t) on real arithmetic
/// for Dt, delta and eta. Throws InputError when eta <= 0 (R not positive
/// definite).
DivFreeFactors divfree_extend_hermitian(const DivFreeFactors& f, std::span<const Complex> v,
                                        Real t, std::optional<real_t> norm_ref = std::nullopt);

/// Appends an i-row/column block [[R_k, V], [Y^H, T]]. The inner matrix
/// delta T - Y^H Lt Dt Mt^H V is factored division-free with unit steps.
DivFreeFactors divfree_extend_block(const DivFreeFactors& f, const ComplexMatrix& V,
                                    const ComplexMatrix& Y_h, const ComplexMatrix& T,
                                    std::optional<real_t> norm_ref = std::nullopt);

/// Multiplies delta and Dt by 2^e (e from rescale_exponent); the represented
/// inverse is unchanged. No-op when the policy is disabled.
DivFreeFactors rescale(DivFreeFactors f, RescalePolicy& policy);

/// General division-free factorization along a block schedule (empty: all
/// ones), rescaling after every extension when enabled.
DivFreeFactors divfree_factorize(const ComplexMatrix& R, std::span<const std::size_t> schedule = {},
                                 RescalePolicy policy = {});

/// Lt (Dt / delta) Lt^H = R^-1 for Hermitian positive definite R.
/// Throws InputError for non-Hermitian or non-positive-definite input.
DivFreeFactors divfree_ldl_hermitian(const ComplexMatrix& R, RescalePolicy policy = {});

/// Q = Lt (Dt rho) Mt^H with rho = 1/delta: exactly one division. Hermitian
/// factors fill the upper triangle and mirror it.
ComplexMatrix assemble_q(const DivFreeFactors& f);

/// Factor file: a header line
///   # delta=<re+imj>,accumulated_shift=<n>,order=<k>,hermitian=<0|1>
/// followed by the k rows of Lt, the k rows of diag(Dt) and, unless
/// hermitian, the k rows of Mt, all in the matrix CSV format.
void write_divfree(std::ostream& os, const DivFreeFactors& f);
DivFreeFactors read_divfree(std::istream& is);

}  // namespace invldm
