#pragma once

#include <span>
#include <vector>

#include "invldm/matrix.hpp"

namespace invldm {

/// Upper-triangular factors of an inverse: L diag(D) M^H = R^-1, with L and
/// M unit upper-triangular. Entries below the diagonals are never written.
struct InvLdmFactors {
  ComplexMatrix L;
  ComplexVector D;
  ComplexMatrix M;

  std::size_t order() const { return D.size(); }
};

/// Inverse "LU" factors L U = R^-1 with L unit upper-triangular and U
/// lower-triangular, i.e. a UL-shaped product. U = D M^H of the LDM^T form.
struct InvLuFactors {
  ComplexMatrix L;
  ComplexMatrix U;

  std::size_t order() const { return L.rows(); }
};

/// Pivot |p| <= 1e-13 * max(1, ref) is treated as zero.
inline constexpr real_t kPivotTolerance = 1e-13;

/// Order-1 factors of [r11]: L = M = [1], D = [1/r11]. One division.
/// Throws SingularError when r11 is zero relative to `norm_ref`.
InvLdmFactors inv_ldm_base(Complex r11, real_t norm_ref = 1);

/// Factors of the order-(k+i) matrix [[R_k, V], [Y^H, T]] given those of
/// R_k. The Schur complement T - Y^H R_k^-1 V is factored with unit steps.
InvLdmFactors inv_ldm_extend(const InvLdmFactors& f, const ComplexMatrix& V,
                             const ComplexMatrix& Y_h, const ComplexMatrix& T);

/// Runs inv_ldm_extend along `schedule` (block sizes summing to the order of
/// R). The first block is factored with unit steps. Empty schedule means all
/// ones.
InvLdmFactors inv_ldm_factorize(const ComplexMatrix& R, std::span<const std::size_t> schedule = {});

InvLuFactors inv_lu_base(Complex r11, real_t norm_ref = 1);
InvLuFactors inv_lu_extend(const InvLuFactors& f, const ComplexMatrix& V, const ComplexMatrix& Y_h,
                           const ComplexMatrix& T);
InvLuFactors inv_lu_factorize(const ComplexMatrix& R, std::span<const std::size_t> schedule = {});

/// U = D M^H.
InvLuFactors to_inv_lu(const InvLdmFactors& f);

ComplexMatrix assemble_inverse(const InvLdmFactors& f);
ComplexMatrix assemble_inverse(const InvLuFactors& f);

/// Validates a block schedule against an order; empty means all ones.
std::vector<std::size_t> normalize_schedule(std::span<const std::size_t> schedule,
                                            std::size_t order);

}  // namespace invldm
