#include <sstream>
#include <string>

#include "invldm/audit.hpp"
#include "invldm/bench.hpp"
#include "invldm/errors.hpp"
#include "invldm/vblast.hpp"
#include "support.hpp"

using namespace invldm;

namespace {

MimoInstance instance(std::size_t n, std::size_t k, double snr_db, std::uint64_t seed,
                      const Constellation& c = Constellation::qpsk()) {
  const TrialDraw d = draw_trial(n, k, c.points().size(), seed, 0);
  return make_instance(d, c, alpha_from_snr_db(snr_db));
}

std::vector<oracle::cd> plain(const ComplexVector& v) {
  std::vector<oracle::cd> out;
  for (const Complex& x : v) out.push_back(x.value());
  return out;
}

std::size_t brute_slice(const Constellation& c, oracle::cd z) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.points().size(); ++i)
    if (std::abs(z - c.points()[i]) < std::abs(z - c.points()[best])) best = i;
  return best;
}

}  // namespace

TEST_CASE("constellations") {
  const Constellation q = Constellation::qpsk();
  REQUIRE(q.points().size() == 4);
  const double a = std::sqrt(0.5);
  CHECK(std::abs(q.points()[0] - oracle::cd(a, a)) < 1e-15);
  CHECK(std::abs(q.points()[2] - oracle::cd(-a, -a)) < 1e-15);
  for (const char* name : {"qpsk", "bpsk", "qam16"}) {
    const Constellation c = Constellation::by_name(name);
    CHECK(c.name() == name);
    double e = 0;
    for (const auto& p : c.points()) e += std::norm(p);
    CHECK(e / static_cast<double>(c.points().size()) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(Constellation::qam16().points().size() == 16);
  CHECK_THROWS_AS(Constellation::by_name("8psk"), InputError);
}

TEST_CASE("slicing matches a brute-force nearest point, with and without scale") {
  SeededStream rng(77);
  for (const char* name : {"qpsk", "bpsk", "qam16"}) {
    const Constellation c = Constellation::by_name(name);
    for (int t = 0; t < 300; ++t) {
      const oracle::cd z = 1.5 * rng.complex_normal();
      const double scale = 0.125 + 4 * rng.uniform();
      CHECK(c.slice(Complex(z)) == brute_slice(c, z));
      CHECK(c.slice(Complex(z * scale), Real(scale)) == brute_slice(c, z));
    }
  }
  // Equidistant from every QPSK point: lowest index wins.
  CHECK(Constellation::qpsk().slice(Complex()) == 0);
  CHECK(Constellation::bpsk().slice(Complex(0.0, 1.0)) == 0);
}

TEST_CASE("instance validation") {
  MimoInstance m = instance(3, 2, 10, 1);
  CHECK_NOTHROW(m.validate());
  m.alpha = -1;
  CHECK_THROWS_AS(m.validate(), InputError);
  MimoInstance wide = instance(3, 2, 10, 1);
  wide.H = support::random_matrix(2, 3, 5);
  CHECK_THROWS_AS(detect_sqrtfree(wide, Constellation::qpsk()), DimensionError);
  MimoInstance shortx = instance(3, 2, 10, 1);
  shortx.x.pop_back();
  CHECK_THROWS_AS(detect_recursive(shortx, Constellation::qpsk()), DimensionError);
}

TEST_CASE("MMSE estimate equals (H^H H + alpha I)^-1 H^H x") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const MimoInstance m = instance(6, 4, 15, 900 + s);
    const oracle::Mat h = oracle::from(m.H);
    const oracle::Mat q = oracle::inverse(oracle::gram(h, m.alpha));
    const std::vector<oracle::cd> x = plain(m.x);
    const ComplexVector est = mmse_estimate(m);
    for (std::size_t i = 0; i < 4; ++i) {
      oracle::cd e = 0;
      for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t n = 0; n < 6; ++n) e += q(i, j) * std::conj(h(n, j)) * x[n];
      CHECK(std::abs(est[i].value() - e) <= 1e-10 * (1 + std::abs(e)));
    }
  }
}

TEST_CASE("sic_cancel") {
  const ComplexVector x{Complex(1.0, 1.0), Complex(2.0)};
  const ComplexVector h{Complex(0.5), Complex(0.0, 1.0)};
  const ComplexVector r = sic_cancel(x, h, Complex(2.0));
  CHECK(r[0].value() == oracle::cd(0, 1));
  CHECK(r[1].value() == oracle::cd(2, -2));
}

TEST_CASE("all detectors follow an independent OSIC") {
  for (const char* cname : {"qpsk", "qam16"}) {
    const Constellation c = Constellation::by_name(cname);
    for (std::uint64_t s = 0; s < 40; ++s) {
      const std::size_t k = 1 + s % 8, n = k + s % 3;
      const MimoInstance m = instance(n, k, 5.0 + static_cast<double>(s % 4) * 5, 1000 + s, c);
      const oracle::OsicOutcome ref = oracle::osic(oracle::from(m.H), plain(m.x), m.alpha, c.points());
      if (ref.min_gap < 1e-9) continue;
      for (DetectorKind kind : {DetectorKind::recursive, DetectorKind::sqrtfree, DetectorKind::oracle}) {
        CAPTURE(detector_name(kind));
        const DetectionResult r = detect(kind, m, c);
        CHECK(r.order == ref.order);
        CHECK(r.symbol_indices == ref.symbols);
        for (std::size_t i = 0; i < k; ++i) CHECK(r.symbols[i] == c.points()[r.symbol_indices[i]]);
      }
    }
  }
}

TEST_CASE("noise-free detection recovers the transmitted symbols") {
  const Constellation c = Constellation::qpsk();
  for (std::uint64_t s = 0; s < 10; ++s) {
    const TrialDraw d = draw_trial(8, 6, 4, 1100 + s, 0);
    MimoInstance m = make_instance(d, c, 0.0);
    m.alpha = 1e-6;
    for (DetectorKind kind : {DetectorKind::recursive, DetectorKind::sqrtfree, DetectorKind::oracle})
      CHECK(detect(kind, m, c).symbol_indices == d.symbols);
  }
}

TEST_CASE("observer sees the inverse of the remaining Gram matrix") {
  const MimoInstance m = instance(7, 6, 10, 1200);
  const oracle::Mat h = oracle::from(m.H);
  for (DetectorKind kind : {DetectorKind::recursive, DetectorKind::sqrtfree}) {
    std::size_t calls = 0;
    DetectorOptions opt;
    opt.on_iteration = [&](const std::vector<std::size_t>& left, const ComplexMatrix& q) {
      ++calls;
      const oracle::Mat ref = oracle::inverse(oracle::gram(oracle::columns(h, left), m.alpha));
      CHECK(oracle::max_abs_diff(oracle::from(q), ref) <= 1e-10);
    };
    detect(kind, m, Constellation::qpsk(), opt);
    CHECK(calls == 6);
  }
}

TEST_CASE("first soft estimate is the MMSE estimate of the first stream") {
  const MimoInstance m = instance(6, 5, 20, 1300);
  const ComplexVector mmse = mmse_estimate(m);
  DetectorOptions opt;
  opt.normalize_soft = true;
  for (DetectorKind kind : {DetectorKind::recursive, DetectorKind::sqrtfree, DetectorKind::oracle}) {
    const DetectionResult r = detect(kind, m, Constellation::qpsk(), opt);
    const std::size_t s = r.order[0];
    CHECK(std::abs(r.soft_estimates[s] - mmse[s].value()) <= 1e-10);
  }
}

TEST_CASE("operation profile of each detector") {
  const MimoInstance m = instance(10, 8, 20, 1400);
  AuditContext ctx;
  const auto sq = audited_region(ctx, [&] { return detect_sqrtfree(m, Constellation::qpsk()); });
  CHECK(assert_free_of(sq.counts, {OpKind::div, OpKind::sqrt}));
  CHECK(sq.result.osic_counts.cmul > 0);
  CHECK(sq.result.iterations.size() == 8);

  const auto rec = audited_region(ctx, [&] { return detect_recursive(m, Constellation::qpsk()); });
  CHECK(rec.result.init_counts.cdiv == 1);
  CHECK(rec.result.osic_counts.cdiv == 7);
  CHECK(rec.result.osic_counts.csqrt == 0);
  CHECK(rec.counts.cdiv == 8);

  // Phase tallies add up to the whole run.
  const DetectionResult& r = rec.result;
  CHECK(r.gram_counts.cmul + r.init_counts.cmul + r.osic_counts.cmul == rec.counts.cmul);
  OpCounts per_iteration;
  for (const IterationRecord& it : r.iterations) per_iteration = per_iteration + it.counts;
  CHECK(per_iteration.cdiv == r.osic_counts.cdiv);
}

TEST_CASE("single stream") {
  const MimoInstance m = instance(2, 1, 20, 1500);
  for (DetectorKind kind : {DetectorKind::recursive, DetectorKind::sqrtfree, DetectorKind::oracle}) {
    const DetectionResult r = detect(kind, m, Constellation::qpsk());
    CHECK(r.order == std::vector<std::size_t>{0});
    CHECK(r.min_diagonal_gap == std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("detector names and CSV output") {
  for (DetectorKind kind : {DetectorKind::recursive, DetectorKind::sqrtfree, DetectorKind::oracle})
    CHECK(detector_from_name(detector_name(kind)) == kind);
  CHECK_THROWS_AS(detector_from_name("zf"), InputError);

  const DetectionResult r = detect_sqrtfree(instance(4, 3, 20, 1600), Constellation::qpsk());
  std::ostringstream os;
  write_detection_csv(os, r);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "position,stream,estimate_re,estimate_im,symbol");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(line.rfind(std::to_string(rows) + "," + std::to_string(r.order[rows - 1] + 1) + ",", 0) == 0);
  }
  CHECK(rows == 3);
}
