#include "invldm/inv_ldm.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "invldm/errors.hpp"
#include "triangular.hpp"

namespace invldm {

namespace {

void check_pivot(Complex p, real_t norm_ref, const char* where) {
  if (magnitude(p) <= kPivotTolerance * std::max<real_t>(1, norm_ref)) {
    throw SingularError(std::string(where) + ": zero pivot");
  }
}

void check_extension_shapes(std::size_t k, const ComplexMatrix& V, const ComplexMatrix& Y_h,
                            const ComplexMatrix& T) {
  const std::size_t i = T.rows();
  if (!T.is_square() || V.rows() != k || V.cols() != i || Y_h.rows() != i || Y_h.cols() != k) {
    throw DimensionError("extension blocks do not match a " + std::to_string(k) + "+" +
                         std::to_string(i) + " partition");
  }
}

}  // namespace

std::vector<std::size_t> normalize_schedule(std::span<const std::size_t> schedule,
                                            std::size_t order) {
  if (schedule.empty()) return std::vector<std::size_t>(order, 1);
  if (std::find(schedule.begin(), schedule.end(), 0) != schedule.end()) {
    throw DimensionError("schedule entries must be positive");
  }
  const std::size_t total = std::accumulate(schedule.begin(), schedule.end(), std::size_t{0});
  if (total != order) {
    throw DimensionError("schedule sums to " + std::to_string(total) + ", matrix order is " +
                         std::to_string(order));
  }
  return {schedule.begin(), schedule.end()};
}

InvLdmFactors inv_ldm_base(Complex r11, real_t norm_ref) {
  check_pivot(r11, norm_ref, "inv_ldm_base");
  InvLdmFactors f{ComplexMatrix::identity(1), {Complex(1.0) / r11}, ComplexMatrix::identity(1)};
  return f;
}

InvLdmFactors inv_ldm_extend(const InvLdmFactors& f, const ComplexMatrix& V,
                             const ComplexMatrix& Y_h, const ComplexMatrix& T) {
  const std::size_t k = f.order();
  const std::size_t i = T.rows();
  check_extension_shapes(k, V, Y_h, T);

  // W = L D M^H V and Z = Y^H L D M^H, both through the triangles only.
  const ComplexMatrix W = tri::upper_times(f.L, tri::diag_times(f.D, tri::upper_adjoint_times(f.M, V, true)), true);
  const ComplexMatrix Z = tri::times_upper_adjoint(tri::times_diag(tri::times_upper(Y_h, f.L, true), f.D), f.M, true);

  const ComplexMatrix S = subtract(T, multiply(Y_h, W));
  // F G E^H = S^-1; pivots are judged against ||S||.
  const InvLdmFactors inner = inv_ldm_factorize(S);

  const ComplexMatrix A = tri::negate(tri::times_upper(W, inner.L, true));
  const ComplexMatrix B_h = tri::negate(tri::upper_adjoint_times(inner.M, Z, true));

  InvLdmFactors out{ComplexMatrix(k + i, k + i), f.D, ComplexMatrix(k + i, k + i)};
  out.L.set_block(0, 0, f.L);
  out.L.set_block(0, k, A);
  out.L.set_block(k, k, inner.L);
  out.M.set_block(0, 0, f.M);
  out.M.set_block(0, k, B_h.adjoint());
  out.M.set_block(k, k, inner.M);
  out.D.insert(out.D.end(), inner.D.begin(), inner.D.end());
  return out;
}

InvLdmFactors inv_ldm_factorize(const ComplexMatrix& R, std::span<const std::size_t> schedule) {
  if (!R.is_square()) throw DimensionError("inv_ldm_factorize: matrix must be square");
  const auto blocks = normalize_schedule(schedule, R.rows());
  const real_t ref = inf_norm(R);

  InvLdmFactors f = inv_ldm_base(R(0, 0), ref);
  std::size_t k = 1;
  // A leading block larger than one is grown one step at a time.
  for (; k < blocks.front(); ++k) {
    f = inv_ldm_extend(f, R.block(0, k, k, 1), R.block(k, 0, 1, k), R.block(k, k, 1, 1));
  }
  for (std::size_t b = 1; b < blocks.size(); ++b) {
    const std::size_t i = blocks[b];
    f = inv_ldm_extend(f, R.block(0, k, k, i), R.block(k, 0, i, k), R.block(k, k, i, i));
    k += i;
  }
  return f;
}

InvLuFactors inv_lu_base(Complex r11, real_t norm_ref) {
  check_pivot(r11, norm_ref, "inv_lu_base");
  ComplexMatrix U(1, 1);
  U(0, 0) = Complex(1.0) / r11;
  return {ComplexMatrix::identity(1), U};
}

InvLuFactors inv_lu_extend(const InvLuFactors& f, const ComplexMatrix& V, const ComplexMatrix& Y_h,
                           const ComplexMatrix& T) {
  const std::size_t k = f.order();
  const std::size_t i = T.rows();
  check_extension_shapes(k, V, Y_h, T);

  const ComplexMatrix W = tri::upper_times(f.L, tri::lower_times(f.U, V), true);  // L U V
  const ComplexMatrix Z = tri::times_lower(tri::times_upper(Y_h, f.L, true), f.U);  // Y^H L U
  const ComplexMatrix S = subtract(T, multiply(Y_h, W));
  const InvLuFactors inner = inv_lu_factorize(S);  // F P = S^-1

  InvLuFactors out{ComplexMatrix(k + i, k + i), ComplexMatrix(k + i, k + i)};
  out.L.set_block(0, 0, f.L);
  out.L.set_block(0, k, tri::negate(tri::times_upper(W, inner.L, true)));
  out.L.set_block(k, k, inner.L);
  out.U.set_block(0, 0, f.U);
  out.U.set_block(k, 0, tri::negate(tri::lower_times(inner.U, Z)));
  out.U.set_block(k, k, inner.U);
  return out;
}

InvLuFactors inv_lu_factorize(const ComplexMatrix& R, std::span<const std::size_t> schedule) {
  if (!R.is_square()) throw DimensionError("inv_lu_factorize: matrix must be square");
  const auto blocks = normalize_schedule(schedule, R.rows());
  const real_t ref = inf_norm(R);

  InvLuFactors f = inv_lu_base(R(0, 0), ref);
  std::size_t k = 1;
  for (; k < blocks.front(); ++k) {
    f = inv_lu_extend(f, R.block(0, k, k, 1), R.block(k, 0, 1, k), R.block(k, k, 1, 1));
  }
  for (std::size_t b = 1; b < blocks.size(); ++b) {
    const std::size_t i = blocks[b];
    f = inv_lu_extend(f, R.block(0, k, k, i), R.block(k, 0, i, k), R.block(k, k, i, i));
    k += i;
  }
  return f;
}

InvLuFactors to_inv_lu(const InvLdmFactors& f) {
  return {f.L, tri::diag_times(f.D, f.M.adjoint())};
}

ComplexMatrix assemble_inverse(const InvLdmFactors& f) {
  return tri::upper_times(f.L, tri::diag_times(f.D, f.M.adjoint()), true);
}

ComplexMatrix assemble_inverse(const InvLuFactors& f) {
  return tri::upper_times(f.L, f.U, true);
}

}  // namespace invldm
