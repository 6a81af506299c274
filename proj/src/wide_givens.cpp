#include "invldm/wide_givens.hpp"

#include <cmath>
#include <string>

#include "invldm/audit.hpp"
#include "invldm/errors.hpp"

namespace invldm {

WideRotationResult make_wide_rotation(Complex a, Complex b, Real d_a, Real d_b) {
  if (a == Complex() && b == Complex()) throw InputError("make_wide_rotation: a and b are both zero");
  if (!(d_a > Real(0.0)) || !(d_b > Real(0.0))) {
    throw InputError("make_wide_rotation: weights must be positive");
  }
  WideRotationResult r;
  if (b == Complex()) {
    r.rot.theta = ComplexMatrix::identity(2);
    r.rot.skip = true;
    r.new_weights = {d_a, d_b};
    r.tau = Real(1.0);
    return r;
  }
  r.tau = d_a * norm(a) + d_b * norm(b);
  r.rot.theta(0, 0) = conj(a) * d_a;
  r.rot.theta(0, 1) = -b;
  r.rot.theta(1, 0) = conj(b) * d_b;
  r.rot.theta(1, 1) = a;
  r.rot.tau = r.tau;
  r.new_weights = {Real(1.0), d_a * d_b};
  return r;
}

ComplexMatrix WeightedTriangular::represented() const {
  CountingPause pause;
  const std::size_t n = order();
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      complex_t acc = 0;
      for (std::size_t m = 0; m < n; ++m) {
        acc += L(i, m).value() * d[m].value() * std::conj(L(j, m).value());
      }
      out(i, j) = acc / delta.value();
    }
  }
  return out;
}

namespace {

void check_shape(const ComplexMatrix& L, std::size_t p) {
  const std::size_t k = L.rows();
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const std::size_t first = i < p ? i : i + 1;
    for (std::size_t c = 0; c < first && c < k; ++c) {
      if (L(i, c) != Complex()) {
        throw InputError("block_triangularize: row " + std::to_string(i) +
                         " is not in shifted upper-triangular shape");
      }
    }
  }
}

void rescale_delta(WeightedTriangular& w, RescalePolicy& policy) {
  if (!policy.enabled) return;
  const int e = rescale_exponent(Complex(w.delta));
  if (e == 0) return;
  w.delta = scale_pow2(w.delta, e);
  for (Real& x : w.d) x = scale_pow2(x, e);
  policy.accumulated_shift += e;
}

// d_j 4^-m in [0.5, 2), column j of L times 2^m.
void normalize_weights(WeightedTriangular& w) {
  const std::size_t k = w.order();
  for (std::size_t j = 0; j < k; ++j) {
    const real_t v = w.d[j].value();
    if (!(v > 0) || !std::isfinite(v)) continue;
    int m = 0;
    real_t t = v;
    while (t >= 2) {
      t = std::ldexp(t, -2);
      ++m;
    }
    while (t < 0.5) {
      t = std::ldexp(t, 2);
      --m;
    }
    if (m == 0) continue;
    w.d[j] = scale_pow2(w.d[j], -2 * m);
    for (std::size_t i = 0; i < k; ++i) w.L(i, j) = scale_pow2(w.L(i, j), m);
  }
}

}  // namespace

BlockTriangularResult block_triangularize(WeightedTriangular w, RescalePolicy& policy) {
  const std::size_t k = w.order();
  if (w.L.rows() != k || w.L.cols() != k) {
    throw DimensionError("block_triangularize: L must be " + std::to_string(k) + "x" +
                         std::to_string(k));
  }
  const std::size_t last = k - 1;
  std::size_t p = 0;
  while (p < k && w.L(last, p) == Complex()) ++p;
  if (p == k) throw SingularError("block_triangularize: bottom row is zero");
  check_shape(w.L, p);

  for (std::size_t j = p; j < last; ++j) {
    // b sits in column j and is zeroed; a is in column j + 1.
    const Complex b = w.L(last, j);
    if (b == Complex()) continue;
    const Complex a = w.L(last, j + 1);
    const WideRotationResult r = make_wide_rotation(a, b, w.d[j + 1], w.d[j]);
    const ComplexMatrix& th = r.rot.theta;
    for (std::size_t i = 0; i <= j; ++i) {
      const Complex xa = w.L(i, j + 1);
      const Complex xb = w.L(i, j);
      w.L(i, j + 1) = xa * th(0, 0) + xb * th(1, 0);
      w.L(i, j) = xa * th(0, 1) + xb * th(1, 1);
    }
    w.L(last, j + 1) = Complex(r.tau);
    w.L(last, j) = Complex();

    for (std::size_t m = 0; m < k; ++m) {
      if (m != j && m != j + 1) w.d[m] = w.d[m] * r.tau;
    }
    w.d[j + 1] = r.new_weights.first;
    w.d[j] = r.new_weights.second;
    w.delta = w.delta * r.tau;
    rescale_delta(w, policy);
  }
  if (policy.enabled) normalize_weights(w);
  if (!std::isfinite(w.delta.value()) || !(w.delta.value() > 0)) {
    throw SingularError("block_triangularize: delta left the double range (rescaling disabled?)");
  }

  BlockTriangularResult out{std::move(w), ComplexVector(last), Complex()};
  for (std::size_t i = 0; i < last; ++i) out.mu[i] = out.w.L(i, last);
  out.lambda = out.w.L(last, last);
  return out;
}

}  // namespace invldm
