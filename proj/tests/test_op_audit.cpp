#include <thread>

#include "invldm/audit.hpp"
#include "invldm/divfree.hpp"
#include "invldm/inv_ldm.hpp"
#include "invldm/scalar.hpp"
#include "support.hpp"

using namespace invldm;

TEST_CASE("single operations") {
  AuditContext ctx;
  const Complex a(1.0, 2.0), b(3.0, -1.0);
  CHECK(audited_region(ctx, [&] { return a * b; }).counts == OpCounts{1, 0, 0, 0, 0, 0});
  CHECK(audited_region(ctx, [&] { return a + b; }).counts == OpCounts{0, 1, 0, 0, 0, 0});
  CHECK(audited_region(ctx, [&] { return a - b; }).counts == OpCounts{0, 1, 0, 0, 0, 0});
  CHECK(audited_region(ctx, [&] { return a / b; }).counts == OpCounts{0, 0, 1, 0, 0, 0});
  CHECK(audited_region(ctx, [&] { return sqrt(a); }).counts == OpCounts{0, 0, 0, 1, 0, 0});
  CHECK(audited_region(ctx, [&] { return Real(2.0) * Real(3.0); }).counts == OpCounts{0, 0, 0, 0, 1, 0});
  CHECK(audited_region(ctx, [&] { return Real(1.0) / Real(3.0); }).counts.cdiv == 1);
  CHECK(audited_region(ctx, [&] { return norm(a); }).counts == OpCounts{0, 0, 0, 0, 2, 1});
}

TEST_CASE("free operations") {
  AuditContext ctx;
  const Complex a(1.0, 2.0);
  const auto run = audited_region(ctx, [&] {
    Complex z = -a;
    z = conj(z);
    z = scale_pow2(z, 3);
    return z == a || real(z) < Real(0.0);
  });
  CHECK(run.counts == OpCounts{});
  CHECK(audited_region(ctx, [] {}).counts == OpCounts{});
}

TEST_CASE("audited results are bit-identical to unaudited ones") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const ComplexMatrix r = support::random_pd(1 + s % 9, 0.1, s);
    AuditContext ctx;
    const auto audited = audited_region(ctx, [&] { return assemble_q(divfree_ldl_hermitian(r)); });
    CHECK(audited.result == assemble_q(divfree_ldl_hermitian(r)));
    const auto ldm = audited_region(ctx, [&] { return assemble_inverse(inv_ldm_factorize(r)); });
    CHECK(ldm.result == assemble_inverse(inv_ldm_factorize(r)));
  }
}

TEST_CASE("nested regions are rejected") {
  AuditContext outer, inner;
  AuditScope scope(outer);
  CHECK_THROWS_AS(AuditScope{inner}, AuditError);
}

TEST_CASE("counts are additive and deterministic") {
  const ComplexMatrix r = support::random_pd(6, 0.1, 5);
  AuditContext ctx;
  const auto a = audited_region(ctx, [&] { return divfree_ldl_hermitian(r); });
  const auto b = audited_region(ctx, [&] { return assemble_q(a.result); });
  const auto both = audited_region(ctx, [&] { return assemble_q(divfree_ldl_hermitian(r)); });
  CHECK(both.counts == a.counts + b.counts);
  CHECK(ctx.counts() == a.counts + b.counts + both.counts);
  CHECK(audited_region(ctx, [&] { return divfree_ldl_hermitian(r); }).counts == a.counts);
}

TEST_CASE("disabled context and paused counting record nothing") {
  AuditContext off(false);
  const auto run = audited_region(off, [] { return Complex(1.0) * Complex(2.0); });
  CHECK(run.counts == OpCounts{});
  CHECK(run.result.value() == complex_t(2.0));

  AuditContext on;
  const auto paused = audited_region(on, [] {
    CountingPause pause;
    return Complex(1.0) / Complex(3.0);
  });
  CHECK(paused.counts == OpCounts{});
}

TEST_CASE("nothing is counted outside a region and threads are isolated") {
  CHECK_FALSE(current_counts().has_value());
  AuditContext ctx;
  AuditScope scope(ctx);
  std::thread other([] {
    AuditContext mine;
    const auto run = audited_region(mine, [] { return Complex(1.0) * Complex(1.0); });
    CHECK(run.counts.cmul == 1);
  });
  other.join();
  CHECK(scope.counts() == OpCounts{});
}

TEST_CASE("assert_free_of") {
  CHECK(assert_free_of(OpCounts{}, {OpKind::div, OpKind::sqrt}));
  CHECK_FALSE(assert_free_of(OpCounts{10, 8, 1, 0, 0, 0}, {OpKind::div}));
  CHECK(assert_free_of(OpCounts{10, 8, 1, 0, 0, 0}, {OpKind::sqrt}));

  const ComplexMatrix r = support::random_pd(8, 0.1, 8);
  AuditContext ctx;
  CHECK(assert_free_of(audited_region(ctx, [&] { return divfree_ldl_hermitian(r); }).counts,
                       {OpKind::div, OpKind::sqrt}));
}

TEST_CASE("CSV columns") {
  CHECK(op_counts_csv_header() == "cmul,cadd,cdiv,csqrt");
  CHECK(to_csv(OpCounts{1, 2, 3, 4, 5, 6}) == "1,2,3,4");
}
