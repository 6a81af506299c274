#pragma once

#include <cmath>
#include <complex>

#include "invldm/audit.hpp"

// Counted scalar types. Every kernel is written against Real/Complex; when an
// AuditScope is open on the calling thread the operators tally into it,
// otherwise they are plain floating-point arithmetic with identical results.
//
// Not counted: negation, conjugation, comparisons, real()/imag() extraction
// and multiplication by a power of two (scale_pow2), which models a shift.

namespace invldm {

/// Working precision for every scalar in the library.
using real_t = double;
using complex_t = std::complex<real_t>;

namespace detail {
inline void tally_cmul() { if (active_counts) ++active_counts->cmul; }
inline void tally_cadd() { if (active_counts) ++active_counts->cadd; }
inline void tally_rmul() { if (active_counts) ++active_counts->rmul; }
inline void tally_radd() { if (active_counts) ++active_counts->radd; }
inline void tally_div() { if (active_counts) ++active_counts->cdiv; }
inline void tally_sqrt() { if (active_counts) ++active_counts->csqrt; }
}  // namespace detail

class Real {
 public:
  constexpr Real() = default;
  constexpr Real(real_t v) : v_(v) {}  // NOLINT(google-explicit-constructor)

  constexpr real_t value() const { return v_; }

  Real& operator+=(Real o) { detail::tally_radd(); v_ += o.v_; return *this; }
  Real& operator-=(Real o) { detail::tally_radd(); v_ -= o.v_; return *this; }
  Real& operator*=(Real o) { detail::tally_rmul(); v_ *= o.v_; return *this; }
  Real& operator/=(Real o) { detail::tally_div(); v_ /= o.v_; return *this; }

  friend Real operator+(Real a, Real b) { return a += b; }
  friend Real operator-(Real a, Real b) { return a -= b; }
  friend Real operator*(Real a, Real b) { return a *= b; }
  friend Real operator/(Real a, Real b) { return a /= b; }
  friend constexpr Real operator-(Real a) { return Real(-a.v_); }

  friend constexpr bool operator==(Real a, Real b) { return a.v_ == b.v_; }
  friend constexpr auto operator<=>(Real a, Real b) { return a.v_ <=> b.v_; }

 private:
  real_t v_ = 0;
};

class Complex {
 public:
  constexpr Complex() = default;
  constexpr Complex(complex_t v) : v_(v) {}  // NOLINT(google-explicit-constructor)
  constexpr explicit Complex(real_t re, real_t im = 0) : v_(re, im) {}
  constexpr explicit Complex(Real re) : v_(re.value(), 0) {}

  constexpr complex_t value() const { return v_; }
  constexpr real_t re() const { return v_.real(); }
  constexpr real_t im() const { return v_.imag(); }

  Complex& operator+=(Complex o) { detail::tally_cadd(); v_ += o.v_; return *this; }
  Complex& operator-=(Complex o) { detail::tally_cadd(); v_ -= o.v_; return *this; }
  Complex& operator*=(Complex o) { detail::tally_cmul(); v_ *= o.v_; return *this; }
  Complex& operator/=(Complex o) { detail::tally_div(); v_ /= o.v_; return *this; }
  Complex& operator+=(Real o) { detail::tally_cadd(); v_ += o.value(); return *this; }
  Complex& operator-=(Real o) { detail::tally_cadd(); v_ -= o.value(); return *this; }
  Complex& operator*=(Real o) { detail::tally_cmul(); v_ *= o.value(); return *this; }
  Complex& operator/=(Real o) { detail::tally_div(); v_ /= o.value(); return *this; }

  friend Complex operator+(Complex a, Complex b) { return a += b; }
  friend Complex operator-(Complex a, Complex b) { return a -= b; }
  friend Complex operator*(Complex a, Complex b) { return a *= b; }
  friend Complex operator/(Complex a, Complex b) { return a /= b; }
  friend Complex operator+(Complex a, Real b) { return a += b; }
  friend Complex operator-(Complex a, Real b) { return a -= b; }
  friend Complex operator*(Complex a, Real b) { return a *= b; }
  friend Complex operator/(Complex a, Real b) { return a /= b; }
  friend Complex operator+(Real a, Complex b) { return b += a; }
  friend Complex operator-(Real a, Complex b) { return Complex(a) -= b; }
  friend Complex operator*(Real a, Complex b) { return b *= a; }
  friend Complex operator/(Real a, Complex b) { return Complex(a) /= b; }
  friend constexpr Complex operator-(Complex a) { return Complex(-a.v_); }

  friend constexpr bool operator==(Complex a, Complex b) { return a.v_ == b.v_; }

 private:
  complex_t v_{};
};

inline constexpr Complex conj(Complex z) { return Complex(std::conj(z.value())); }
inline constexpr Real real(Complex z) { return Real(z.re()); }
inline constexpr Real imag(Complex z) { return Real(z.im()); }

/// |z|^2, counted as two real multiplies and one real add.
inline Real norm(Complex z) {
  detail::tally_rmul();
  detail::tally_rmul();
  detail::tally_radd();
  return Real(z.re() * z.re() + z.im() * z.im());
}

inline Real sqrt(Real x) { detail::tally_sqrt(); return Real(std::sqrt(x.value())); }
inline Complex sqrt(Complex z) { detail::tally_sqrt(); return Complex(std::sqrt(z.value())); }

/// x * 2^e. Exact in binary floating point barring overflow/underflow; free.
inline Real scale_pow2(Real x, int e) { return Real(std::ldexp(x.value(), e)); }
inline Complex scale_pow2(Complex z, int e) {
  return Complex(std::ldexp(z.re(), e), std::ldexp(z.im(), e));
}

/// Uncounted magnitude for guards and diagnostics.
inline real_t magnitude(Complex z) { return std::abs(z.value()); }
inline real_t magnitude(Real x) { return std::abs(x.value()); }

}  // namespace invldm
