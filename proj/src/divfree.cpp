#include "invldm/divfree.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "invldm/errors.hpp"
#include "invldm/inv_ldm.hpp"
#include "invldm/matrix_io.hpp"
#include "triangular.hpp"

namespace invldm {

namespace {

real_t local_norm_ref(std::span<const Complex> v, std::span<const Complex> y, Complex t) {
  real_t sv = magnitude(t);
  real_t sy = magnitude(t);
  for (const Complex& z : v) sv += magnitude(z);
  for (const Complex& z : y) sy += magnitude(z);
  return std::max(sv, sy);
}

void check_eta(Complex eta, Complex delta, real_t norm_ref) {
  if (!std::isfinite(std::norm(eta.value()))) {
    throw SingularError("division-free extension: eta is not finite (range exceeded without rescaling)");
  }
  if (eta == Complex() || magnitude(eta) <= kPivotTolerance * magnitude(delta) * norm_ref) {
    throw SingularError("division-free extension: eta is zero to working precision");
  }
}

bool exactly_hermitian(const ComplexMatrix& r) {
  if (r.is_hermitian()) return true;
  if (!r.is_square()) return false;
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = i; j < r.rows(); ++j)
      if (r(i, j).value() != std::conj(r(j, i).value())) return false;
  return true;
}

// Lt Dt Mt^H X, through the triangles.
ComplexMatrix scaled_inverse_times(const DivFreeFactors& f, const ComplexMatrix& x) {
  return tri::upper_times(f.lt, tri::diag_times(f.dt, tri::upper_adjoint_times(f.mt(), x, false)),
                          false);
}

// X Lt Dt Mt^H, through the triangles.
ComplexMatrix times_scaled_inverse(const ComplexMatrix& x, const DivFreeFactors& f) {
  return tri::times_upper_adjoint(tri::times_diag(tri::times_upper(x, f.lt, false), f.dt), f.mt(),
                                  false);
}

// Shared assembly for vector and block extensions, given the inner
// division-free factors (F, G, E, eta) of delta T - Y^H Lt Dt Mt^H V.
DivFreeFactors assemble_extension(const DivFreeFactors& f, const ComplexMatrix& W,
                                  const ComplexMatrix& Z, const DivFreeFactors& inner) {
  const std::size_t k = f.order();
  const std::size_t i = inner.order();
  const Complex eta = inner.delta;

  DivFreeFactors out{ComplexMatrix(k + i, k + i), ComplexVector(k + i), ComplexMatrix(k + i, k + i),
                     f.delta * eta, f.accumulated_shift};
  out.lt.set_block(0, 0, f.lt);
  out.lt.set_block(0, k, tri::negate(tri::times_upper(W, inner.lt, false)));
  out.lt.set_block(k, k, scale(inner.lt, f.delta));

  // Mt^H = [[Mt^H, 0], [-E^H Z, delta E^H]]  =>  Mt = [[Mt, -Z^H E], [0, conj(delta) E]].
  ComplexMatrix& mt = *out.mt_general;
  mt.set_block(0, 0, f.mt());
  mt.set_block(0, k, tri::negate(tri::times_upper(Z.adjoint(), inner.mt(), false)));
  mt.set_block(k, k, scale(inner.mt(), conj(f.delta)));

  for (std::size_t j = 0; j < k; ++j) out.dt[j] = eta * f.dt[j];
  for (std::size_t j = 0; j < i; ++j) out.dt[k + j] = inner.dt[j];
  return out;
}

}  // namespace

int rescale_exponent(Complex delta) {
  real_t n = std::norm(delta.value());
  if (!(n > 0) || !std::isfinite(n)) return 0;
  if (n >= kDeltaNormSqMin && n <= kDeltaNormSqMax) return 0;
  int e = 0;
  while (n > 4) {
    n = std::ldexp(n, -2);
    --e;
  }
  while (n <= 1) {
    n = std::ldexp(n, 2);
    ++e;
  }
  return e;
}

DivFreeFactors divfree_init(Complex r11, bool hermitian) {
  if (r11 == Complex()) throw SingularError("divfree_init: r11 is zero");
  if (hermitian && (r11.im() != 0 || r11.re() <= 0)) {
    throw InputError("divfree_init: Hermitian positive definite input needs real r11 > 0");
  }
  DivFreeFactors f{ComplexMatrix::identity(1), {Complex(1.0)}, std::nullopt, r11, 0};
  if (!hermitian) f.mt_general = ComplexMatrix::identity(1);
  return f;
}

DivFreeFactors divfree_extend_vector(const DivFreeFactors& f, std::span<const Complex> v,
                                     std::span<const Complex> y, Complex t,
                                     std::optional<real_t> norm_ref) {
  const std::size_t k = f.order();
  if (v.size() != k || y.size() != k) {
    throw DimensionError("divfree_extend_vector: v and y must have length " + std::to_string(k));
  }
  const ComplexMatrix V = ComplexMatrix::column(v);
  ComplexMatrix Y_h(1, k);
  for (std::size_t j = 0; j < k; ++j) Y_h(0, j) = conj(y[j]);

  const ComplexMatrix W = scaled_inverse_times(f, V);
  const ComplexMatrix Z = times_scaled_inverse(Y_h, f);
  const Complex s = multiply(Y_h, W)(0, 0);
  const Complex eta = f.delta * t - s;
  check_eta(eta, f.delta, norm_ref.value_or(local_norm_ref(v, y, t)));

  // With i = 1 the inner factors are F = G = E = 1 and the denominator is eta.
  return assemble_extension(f, W, Z, divfree_init(eta));
}

DivFreeFactors divfree_extend_hermitian(const DivFreeFactors& f, std::span<const Complex> v,
                                        Real t, std::optional<real_t> norm_ref) {
  if (!f.hermitian()) throw InputError("divfree_extend_hermitian: factors are not Hermitian");
  const std::size_t k = f.order();
  if (v.size() != k) {
    throw DimensionError("divfree_extend_hermitian: v must have length " + std::to_string(k));
  }
  const ComplexMatrix& L = f.lt;
  const Real delta = real(f.delta);

  // u = Lt^H v, z = Dt u, w = Lt z; s = v^H w = sum_j d_j |u_j|^2 is real.
  ComplexVector u(k);
  for (std::size_t j = 0; j < k; ++j) {
    Complex acc = conj(L(j, j)) * v[j];
    for (std::size_t m = 0; m < j; ++m) acc += conj(L(m, j)) * v[m];
    u[j] = acc;
  }
  ComplexVector z(k);
  for (std::size_t j = 0; j < k; ++j) z[j] = real(f.dt[j]) * u[j];
  ComplexVector w(k);
  for (std::size_t i = 0; i < k; ++i) {
    Complex acc = L(i, i) * z[i];
    for (std::size_t m = i + 1; m < k; ++m) acc += L(i, m) * z[m];
    w[i] = acc;
  }
  Real s = real(f.dt[0]) * norm(u[0]);
  for (std::size_t j = 1; j < k; ++j) s += real(f.dt[j]) * norm(u[j]);

  const Real eta = delta * t - s;
  const real_t ref = norm_ref.value_or(local_norm_ref(v, v, Complex(t)));
  if (!std::isfinite(eta.value())) {
    throw SingularError("divfree_extend_hermitian: eta is not finite (range exceeded without rescaling)");
  }
  if (!(eta.value() > kPivotTolerance * delta.value() * ref)) {
    throw InputError("divfree_extend_hermitian: eta <= 0, matrix is not positive definite");
  }

  DivFreeFactors out{ComplexMatrix(k + 1, k + 1), ComplexVector(k + 1), std::nullopt,
                     Complex(delta * eta), f.accumulated_shift};
  out.lt.set_block(0, 0, L);
  for (std::size_t i = 0; i < k; ++i) out.lt(i, k) = -w[i];
  out.lt(k, k) = Complex(delta);
  for (std::size_t j = 0; j < k; ++j) out.dt[j] = Complex(eta * real(f.dt[j]));
  out.dt[k] = Complex(1.0);
  return out;
}

DivFreeFactors divfree_extend_block(const DivFreeFactors& f, const ComplexMatrix& V,
                                    const ComplexMatrix& Y_h, const ComplexMatrix& T,
                                    std::optional<real_t> norm_ref) {
  const std::size_t k = f.order();
  const std::size_t i = T.rows();
  if (!T.is_square() || V.rows() != k || V.cols() != i || Y_h.rows() != i || Y_h.cols() != k) {
    throw DimensionError("divfree_extend_block: blocks do not match a " + std::to_string(k) + "+" +
                         std::to_string(i) + " partition");
  }
  const ComplexMatrix W = scaled_inverse_times(f, V);
  const ComplexMatrix Z = times_scaled_inverse(Y_h, f);
  const ComplexMatrix inner_matrix = subtract(scale(T, f.delta), multiply(Y_h, W));

  const real_t ref = norm_ref.value_or(std::max({inf_norm(V), inf_norm(Y_h), inf_norm(T)}));
  DivFreeFactors inner = divfree_init(inner_matrix(0, 0));
  check_eta(inner.delta, f.delta, ref);
  for (std::size_t j = 1; j < i; ++j) {
    ComplexVector v = inner_matrix.block(0, j, j, 1).col(0);
    ComplexVector y(j);
    for (std::size_t m = 0; m < j; ++m) y[m] = conj(inner_matrix(j, m));
    inner = divfree_extend_vector(inner, v, y, inner_matrix(j, j),
                                  magnitude(f.delta) * std::max<real_t>(ref, 1));
  }
  return assemble_extension(f, W, Z, inner);
}

DivFreeFactors rescale(DivFreeFactors f, RescalePolicy& policy) {
  if (!policy.enabled) return f;
  const int e = rescale_exponent(f.delta);
  if (e == 0) return f;
  f.delta = scale_pow2(f.delta, e);
  for (Complex& d : f.dt) d = scale_pow2(d, e);
  f.accumulated_shift += e;
  policy.accumulated_shift += e;
  return f;
}

DivFreeFactors divfree_factorize(const ComplexMatrix& R, std::span<const std::size_t> schedule,
                                 RescalePolicy policy) {
  if (!R.is_square()) throw DimensionError("divfree_factorize: matrix must be square");
  const auto blocks = normalize_schedule(schedule, R.rows());
  const real_t ref = inf_norm(R);
  if (magnitude(R(0, 0)) <= kPivotTolerance * std::max<real_t>(1, ref)) {
    throw SingularError("divfree_factorize: r11 is zero");
  }

  DivFreeFactors f = rescale(divfree_init(R(0, 0)), policy);
  std::size_t k = 1;
  for (; k < blocks.front(); ++k) {
    ComplexVector y(k);
    for (std::size_t m = 0; m < k; ++m) y[m] = conj(R(k, m));
    f = rescale(divfree_extend_vector(f, R.block(0, k, k, 1).col(0), y, R(k, k), ref), policy);
  }
  for (std::size_t b = 1; b < blocks.size(); ++b) {
    const std::size_t i = blocks[b];
    f = rescale(divfree_extend_block(f, R.block(0, k, k, i), R.block(k, 0, i, k),
                                     R.block(k, k, i, i), ref),
                policy);
    k += i;
  }
  return f;
}

DivFreeFactors divfree_ldl_hermitian(const ComplexMatrix& R, RescalePolicy policy) {
  if (!exactly_hermitian(R)) throw InputError("divfree_ldl_hermitian: matrix is not Hermitian");
  const std::size_t n = R.rows();
  const real_t ref = inf_norm(R);

  DivFreeFactors f = rescale(divfree_init(R(0, 0), true), policy);
  for (std::size_t k = 1; k < n; ++k) {
    ComplexVector v(k);
    for (std::size_t m = 0; m < k; ++m) v[m] = R(m, k);
    f = rescale(divfree_extend_hermitian(f, v, real(R(k, k)), ref), policy);
  }
  return f;
}

ComplexMatrix assemble_q(const DivFreeFactors& f) {
  if (f.delta == Complex()) throw SingularError("assemble_q: delta is zero");
  const std::size_t n = f.order();
  const ComplexMatrix& L = f.lt;
  ComplexMatrix q(n, n);

  if (f.hermitian()) {
    const Real rho = Real(1.0) / real(f.delta);
    std::vector<Real> d(n);
    for (std::size_t m = 0; m < n; ++m) d[m] = real(f.dt[m]) * rho;
    // P = Lt diag(d) on the strict upper triangle; the diagonal of Q is real.
    ComplexMatrix p(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t m = i + 1; m < n; ++m) p(i, m) = L(i, m) * d[m];
    for (std::size_t i = 0; i < n; ++i) {
      Real diag = d[i] * norm(L(i, i));
      for (std::size_t m = i + 1; m < n; ++m) diag += d[m] * norm(L(i, m));
      q(i, i) = Complex(diag);
      for (std::size_t j = i + 1; j < n; ++j) {
        Complex acc = p(i, j) * conj(L(j, j));
        for (std::size_t m = j + 1; m < n; ++m) acc += p(i, m) * conj(L(j, m));
        q(i, j) = acc;
        q(j, i) = conj(acc);
      }
    }
    return ComplexMatrix::hermitian(q);
  }

  const ComplexMatrix& M = f.mt();
  const Complex rho = Complex(1.0) / f.delta;
  ComplexVector d(n);
  for (std::size_t m = 0; m < n; ++m) d[m] = f.dt[m] * rho;
  ComplexMatrix p(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t m = i; m < n; ++m) p(i, m) = L(i, m) * d[m];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t m0 = std::max(i, j);
      Complex acc = p(i, m0) * conj(M(j, m0));
      for (std::size_t m = m0 + 1; m < n; ++m) acc += p(i, m) * conj(M(j, m));
      q(i, j) = acc;
    }
  }
  return q;
}

void write_divfree(std::ostream& os, const DivFreeFactors& f) {
  os << "# delta=" << format_complex(f.delta.value()) << ",accumulated_shift=" << f.accumulated_shift
     << ",order=" << f.order() << ",hermitian=" << (f.hermitian() ? 1 : 0) << '\n';
  write_matrix_csv(os, f.lt);
  write_matrix_csv(os, ComplexMatrix::diagonal(f.dt));
  if (!f.hermitian()) write_matrix_csv(os, f.mt());
}

DivFreeFactors read_divfree(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# ", 0) != 0) {
    throw InputError("factor file: missing '# delta=...' header");
  }
  complex_t delta{};
  int shift = 0;
  std::size_t order = 0;
  int herm = -1;
  std::istringstream fields(header.substr(2));
  std::string field;
  while (std::getline(fields, field, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw InputError("factor file: malformed header field '" + field + "'");
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "delta") delta = parse_complex(value);
    else if (key == "accumulated_shift") shift = std::stoi(value);
    else if (key == "order") order = std::stoul(value);
    else if (key == "hermitian") herm = std::stoi(value);
    else throw InputError("factor file: unknown header field '" + key + "'");
  }
  if (order == 0 || herm < 0) throw InputError("factor file: header lacks order or hermitian");

  const ComplexMatrix all = read_matrix_csv(is);
  const std::size_t blocks = herm ? 2 : 3;
  if (all.rows() != blocks * order || all.cols() != order) {
    throw InputError("factor file: expected " + std::to_string(blocks * order) + " rows of " +
                     std::to_string(order) + " entries");
  }
  DivFreeFactors f{all.block(0, 0, order, order), ComplexVector(order), std::nullopt, Complex(delta),
                   shift};
  for (std::size_t j = 0; j < order; ++j) f.dt[j] = all(order + j, j);
  if (!herm) f.mt_general = all.block(2 * order, 0, order, order);
  return f;
}

}  // namespace invldm
