#include <cmath>

#include "invldm/audit.hpp"
#include "invldm/errors.hpp"
#include "invldm/wide_givens.hpp"
#include "support.hpp"

using namespace invldm;

namespace {

// Random upper-triangular U with row p moved to the bottom, random weights.
WeightedTriangular shifted(std::size_t k, std::size_t p, std::uint64_t seed) {
  const ComplexMatrix g = support::random_matrix(k, k, seed);
  ComplexMatrix u(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) u(i, j) = g(i, j);
  ComplexMatrix l(k, k);
  std::size_t dst = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (i == p) continue;
    for (std::size_t j = 0; j < k; ++j) l(dst, j) = u(i, j);
    ++dst;
  }
  for (std::size_t j = 0; j < k; ++j) l(k - 1, j) = u(p, j);
  WeightedTriangular w{l, {}, Real(1.0)};
  for (std::size_t j = 0; j < k; ++j) w.d.emplace_back(0.5 + std::norm(g(j, 0).value()));
  w.delta = Real(1.0 + std::norm(g(0, k - 1).value()));
  return w;
}

oracle::Mat form(const WeightedTriangular& w) {
  std::vector<oracle::cd> d;
  for (const Real& x : w.d) d.push_back(x.value());
  const oracle::Mat l = oracle::from(w.L);
  return oracle::weighted_form(l, d, l, w.delta.value());
}

bool upper_with_last_column(const BlockTriangularResult& r) {
  const std::size_t k = r.w.order();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (r.w.L(i, j) != Complex()) return false;
  return true;
}

}  // namespace

TEST_CASE("rotation maps (a, b) to (tau, 0)") {
  const Complex a(1.0, 2.0), b(-0.5, 0.25);
  const WideRotationResult r = make_wide_rotation(a, b, Real(3.0), Real(0.5));
  const ComplexMatrix& th = r.rot.theta;
  CHECK(r.tau.value() == doctest::Approx(3.0 * 5 + 0.5 * 0.3125));
  const oracle::cd first = a.value() * th(0, 0).value() + b.value() * th(1, 0).value();
  const oracle::cd second = a.value() * th(0, 1).value() + b.value() * th(1, 1).value();
  CHECK(std::abs(first - r.tau.value()) <= 1e-14);
  CHECK(std::abs(second) <= 1e-15);
  CHECK(r.new_weights.first.value() == 1.0);
  CHECK(r.new_weights.second.value() == 1.5);
  CHECK_FALSE(r.rot.skip);
}

TEST_CASE("theta diag(new weights) theta^H = tau diag(d_a, d_b)") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const ComplexVector v = support::random_vector(3, 600 + s);
    const double da = 0.25 + std::norm(v[2].value()), db = 2.0 / (1.0 + std::norm(v[2].value()));
    const WideRotationResult r = make_wide_rotation(v[0], v[1], Real(da), Real(db));
    const oracle::Mat th = oracle::from(r.rot.theta);
    const oracle::Mat lhs = oracle::weighted_form(
        th, {r.new_weights.first.value(), r.new_weights.second.value()}, th, 1.0);
    oracle::Mat rhs(2, 2);
    rhs(0, 0) = r.tau.value() * da;
    rhs(1, 1) = r.tau.value() * db;
    CHECK(oracle::max_abs_diff(lhs, rhs) <= 1e-12 * r.tau.value() * (da + db));
  }
}

TEST_CASE("rotation edge cases") {
  const WideRotationResult skip = make_wide_rotation(Complex(2.0), Complex(), Real(1.0), Real(1.0));
  CHECK(skip.rot.skip);
  CHECK(skip.rot.theta == ComplexMatrix::identity(2));
  CHECK(skip.tau.value() == 1.0);
  const WideRotationResult zero_a = make_wide_rotation(Complex(), Complex(0.0, 1.0), Real(2.0), Real(4.0));
  CHECK(zero_a.tau.value() == 4.0);
  CHECK_THROWS_AS(make_wide_rotation(Complex(), Complex(), Real(1.0), Real(1.0)), InputError);
  CHECK_THROWS_AS(make_wide_rotation(Complex(1.0), Complex(1.0), Real(0.0), Real(1.0)), InputError);
  CHECK_THROWS_AS(make_wide_rotation(Complex(1.0), Complex(1.0), Real(1.0), Real(-1.0)), InputError);
}

TEST_CASE("block triangularization preserves the represented matrix") {
  RescalePolicy off{false, 0};
  for (std::size_t k = 2; k <= 8; ++k) {
    for (std::size_t p = 0; p < k; ++p) {
      const WeightedTriangular w = shifted(k, p, 700 + 10 * k + p);
      const oracle::Mat before = form(w);
      const BlockTriangularResult r = block_triangularize(w, off);
      CHECK(upper_with_last_column(r));
      CHECK(oracle::frobenius_diff(form(r.w), before) <= 1e-11 * oracle::frobenius(before));
      CHECK(r.lambda == r.w.L(k - 1, k - 1));
      REQUIRE(r.mu.size() == k - 1);
      for (std::size_t i = 0; i + 1 < k; ++i) CHECK(r.mu[i] == r.w.L(i, k - 1));
      for (const Real& d : r.w.d) CHECK(d.value() > 0);
      CHECK(r.w.delta.value() > 0);
    }
  }
}

TEST_CASE("rescaled triangularization keeps delta and weights in range") {
  RescalePolicy on;
  const WeightedTriangular w = shifted(12, 0, 801);
  const oracle::Mat before = form(w);
  const BlockTriangularResult r = block_triangularize(w, on);
  CHECK(std::norm(r.w.delta.value()) >= kDeltaNormSqMin);
  CHECK(std::norm(r.w.delta.value()) <= kDeltaNormSqMax);
  for (const Real& d : r.w.d) {
    CHECK(d.value() >= 0.5);
    CHECK(d.value() < 2.0);
  }
  CHECK(on.accumulated_shift != 0);
  CHECK(oracle::frobenius_diff(form(r.w), before) <= 1e-11 * oracle::frobenius(before));
  CHECK(upper_with_last_column(r));
}

TEST_CASE("exact zeros in the bottom row are skipped") {
  WeightedTriangular w = shifted(5, 0, 802);
  w.L(4, 2) = Complex();
  RescalePolicy off{false, 0};
  const oracle::Mat before = form(w);
  const BlockTriangularResult r = block_triangularize(w, off);
  CHECK(oracle::frobenius_diff(form(r.w), before) <= 1e-11 * oracle::frobenius(before));
  CHECK(upper_with_last_column(r));
}

TEST_CASE("no divisions or square roots") {
  RescalePolicy on;
  AuditContext ctx;
  const auto out = audited_region(ctx, [&] { return block_triangularize(shifted(10, 3, 803), on); });
  CHECK(assert_free_of(out.counts, {OpKind::div, OpKind::sqrt}));
  CHECK(out.counts.cmul > 0);
}

TEST_CASE("malformed input") {
  RescalePolicy on;
  WeightedTriangular w = shifted(4, 1, 804);
  for (std::size_t j = 0; j < 4; ++j) w.L(3, j) = Complex();
  CHECK_THROWS_AS(block_triangularize(w, on), SingularError);
  WeightedTriangular bad = shifted(4, 2, 805);
  bad.L(1, 0) = Complex(1.0);
  CHECK_THROWS_AS(block_triangularize(bad, on), InputError);
  WeightedTriangular dim = shifted(3, 0, 806);
  dim.d.pop_back();
  CHECK_THROWS_AS(block_triangularize(dim, on), DimensionError);
}
