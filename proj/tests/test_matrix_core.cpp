#include <sstream>

#include "invldm/errors.hpp"
#include "invldm/matrix_io.hpp"
#include "support.hpp"

using namespace invldm;
using support::distance;

TEST_CASE("construction rejects empty shapes and ragged rows") {
  CHECK_THROWS_AS(ComplexMatrix(0, 3), DimensionError);
  CHECK_THROWS_AS(ComplexMatrix(2, 0), DimensionError);
  CHECK_THROWS_AS((ComplexMatrix{{1, 2}, {3}}), DimensionError);
  ComplexMatrix m(2, 3);
  CHECK_THROWS_AS(m.at(2, 0), DimensionError);
  CHECK(m.at(1, 2) == Complex());
}

TEST_CASE("hermitian constructor symmetrizes small asymmetry and rejects large") {
  ComplexMatrix a{{2, {1, 1e-14}}, {{1, -1e-14 + 2e-15}, 3}};
  const ComplexMatrix h = ComplexMatrix::hermitian(a);
  CHECK(h.is_hermitian());
  CHECK(h(0, 1).value() == std::conj(h(1, 0).value()));
  CHECK(h(0, 0).im() == 0);

  ComplexMatrix b{{2, 1}, {0.5, 3}};
  CHECK_THROWS_AS(ComplexMatrix::hermitian(b), InputError);
  CHECK_THROWS_AS(ComplexMatrix::hermitian(ComplexMatrix(2, 3)), InputError);
}

TEST_CASE("mutable access clears the Hermitian flag") {
  ComplexMatrix h = ComplexMatrix::hermitian(ComplexMatrix::identity(2));
  CHECK(h.is_hermitian());
  h(0, 1) = Complex(5.0);
  CHECK_FALSE(h.is_hermitian());
}

TEST_CASE("gram_regularized examples") {
  CHECK(gram_regularized(ComplexMatrix::identity(2), 1.0) ==
        ComplexMatrix({{2, 0}, {0, 2}}));
  const ComplexMatrix r = gram_regularized(ComplexMatrix{{1}, {1}}, 0.5);
  CHECK(r.rows() == 1);
  CHECK(r(0, 0).value() == complex_t(2.5));
  CHECK_THROWS_AS(gram_regularized(ComplexMatrix(2, 3), 0.1), DimensionError);
  CHECK_THROWS_AS(gram_regularized(ComplexMatrix(3, 2), -1), InputError);
}

TEST_CASE("gram_regularized matches the triple-loop oracle") {
  const ComplexMatrix h = support::random_matrix(4, 4, 7);
  const ComplexMatrix r = gram_regularized(h, 0.1);
  CHECK(r.is_hermitian());
  CHECK(distance(r, oracle::to_library(oracle::gram(oracle::from(h), 0.1))) <= 1e-12);

  const ComplexMatrix tall = support::random_matrix(6, 3, 8);
  CHECK(distance(gram_regularized(tall, 0.0),
                 oracle::to_library(oracle::gram(oracle::from(tall), 0.0))) <= 1e-12);
}

TEST_CASE("gram_regularized is positive definite for alpha > 0") {
  const ComplexMatrix r = gram_regularized(support::random_matrix(5, 5, 21), 0.01);
  const oracle::Mat ro = oracle::from(r);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const ComplexVector x = support::random_vector(5, 1000 + s);
    oracle::cd q = 0;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) q += std::conj(x[i].value()) * ro(i, j) * x[j].value();
    CHECK(q.real() > 0);
    CHECK(std::abs(q.imag()) <= 1e-12 * q.real());
  }
}

TEST_CASE("partition shapes and exact round trip") {
  const ComplexMatrix r3 = support::random_matrix(3, 3, 1);
  const BlockPartition p = partition(r3, 2);
  CHECK(p.top_left.rows() == 2);
  CHECK(p.top_right.cols() == 1);
  CHECK(p.bottom_left_h.rows() == 1);
  CHECK(p.bottom_left_h.cols() == 2);
  CHECK(p.bottom_right.rows() == 1);

  const BlockPartition id = partition(ComplexMatrix::identity(4), 2);
  CHECK(id.top_left == ComplexMatrix::identity(2));
  CHECK(id.bottom_right == ComplexMatrix::identity(2));
  CHECK(id.top_right == ComplexMatrix(2, 2));
  CHECK(id.bottom_left_h == ComplexMatrix(2, 2));

  const ComplexMatrix r = support::random_matrix(6, 6, 2);
  for (std::size_t k = 1; k < 6; ++k) CHECK(reassemble(partition(r, k)) == r);
  CHECK_THROWS_AS(partition(r, 0), DimensionError);
  CHECK_THROWS_AS(partition(r, 6), DimensionError);
}

TEST_CASE("append_column_blocks examples") {
  const ComplexVector e1{Complex(1.0), Complex(0.0)};
  const AppendedColumn a = append_column_blocks(ComplexMatrix::identity(2), e1, 1.0);
  CHECK(a.v[0].value() == complex_t(1));
  CHECK(a.v[1].value() == complex_t(0));
  CHECK(a.t.value() == 2.0);

  const ComplexVector zero(2);
  const AppendedColumn b = append_column_blocks(ComplexMatrix::identity(2), zero, 0.5);
  CHECK(b.v[0] == Complex());
  CHECK(b.t.value() == 0.5);
}

TEST_CASE("appending a column agrees with the Gram matrix of the wider channel") {
  const ComplexMatrix h = support::random_matrix(4, 3, 11);
  const ComplexMatrix hk = h.block(0, 0, 4, 2);
  const AppendedColumn a = append_column_blocks(hk, h.col(2), 0.3);
  const ComplexMatrix r = gram_regularized(h, 0.3);
  const ComplexMatrix rk = gram_regularized(hk, 0.3);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(a.v[i].value() - r(i, 2).value()) <= 1e-12);
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(rk(i, j).value() - r(i, j).value()) <= 1e-12);
  }
  CHECK(std::abs(a.t.value() - r(2, 2).re()) <= 1e-12);
}

TEST_CASE("dense_inverse matches the oracle and rejects singular input") {
  const ComplexMatrix a = support::random_dominant(5, 4);
  CHECK(distance(dense_inverse(a), oracle::to_library(oracle::inverse(oracle::from(a)))) <= 1e-12);
  CHECK_THROWS_AS(dense_inverse(ComplexMatrix{{1, 2}, {2, 4}}), SingularError);
}

TEST_CASE("counted products report closed-form counts") {
  const std::size_t K = 5;
  const ComplexMatrix a = support::random_matrix(K, K, 3);
  const ComplexVector x = support::random_vector(K, 4);
  AuditContext ctx;
  const auto run = audited_region(ctx, [&] { return multiply(a, x); });
  CHECK(run.counts.cmul == K * K);
  CHECK(run.counts.cadd == K * (K - 1));
}

TEST_CASE("complex parsing and CSV round trip") {
  CHECK(parse_complex("1.5-0.25j") == complex_t(1.5, -0.25));
  CHECK(parse_complex("-2") == complex_t(-2, 0));
  CHECK(parse_complex("3j") == complex_t(0, 3));
  CHECK(parse_complex("1e-3+2.5E+2j") == complex_t(1e-3, 250));
  CHECK_THROWS_AS(parse_complex("abc"), InputError);

  const ComplexMatrix m = support::random_matrix(3, 4, 9);
  std::stringstream ss;
  write_matrix_csv(ss, m);
  CHECK(read_matrix_csv(ss) == m);

  std::stringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(ragged), InputError);
}
