#include <cmath>
#include <set>
#include <sstream>

#include "invldm/bench.hpp"
#include "invldm/errors.hpp"
#include "invldm/random.hpp"
#include "support.hpp"

using namespace invldm;

namespace {

BenchConfig small_config() {
  BenchConfig cfg;
  cfg.K_list = {2, 4};
  cfg.extra_receive = 1;
  cfg.trials = 12;
  cfg.seed = 5;
  return cfg;
}

std::string flops_csv(const BenchConfig& cfg) {
  std::ostringstream os;
  write_flops_csv(os, flop_sweep(cfg));
  return os.str();
}

std::string ber_csv(const BenchConfig& cfg) {
  std::ostringstream os;
  write_ber_csv(os, ber_sweep(cfg).rows);
  return os.str();
}

const BenchRow& find(const std::vector<BenchRow>& rows, std::size_t k, DetectorKind d, Phase p) {
  for (const BenchRow& r : rows)
    if (r.K == k && r.detector == d && r.phase == p) return r;
  FAIL("row not found");
  return rows.front();
}

}  // namespace

TEST_CASE("splitmix64 reference outputs") {
  // First two outputs of the reference splitmix64 generator seeded with 0.
  SeededStream s(0);
  CHECK(s.next_u64() == 0xE220A8397B1DCDAFULL);
  CHECK(s.next_u64() == 0x6E789E6AA1B965F4ULL);
  CHECK(mix64(0x9E3779B97F4A7C15ULL) == 0xE220A8397B1DCDAFULL);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("stream distributions") {
  SeededStream s(11);
  double mean = 0, power = 0;
  std::complex<double> cmean = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    CHECK(u > 0);
    CHECK(u <= 1);
    mean += u;
    const auto z = s.complex_normal();
    cmean += z;
    power += std::norm(z);
  }
  CHECK(mean / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(power / n == doctest::Approx(1.0).epsilon(0.03));
  CHECK(std::abs(cmean / static_cast<double>(n)) < 0.02);
  std::set<std::size_t> seen;
  for (int i = 0; i < 200; ++i) {
    const std::size_t v = s.index(4);
    CHECK(v < 4);
    seen.insert(v);
  }
  CHECK(seen.size() == 4);
}

TEST_CASE("channels are reproducible") {
  CHECK(generate_channel(3, 2, 9) == generate_channel(3, 2, 9));
  CHECK_FALSE(generate_channel(3, 2, 9) == generate_channel(3, 2, 10));
  const TrialDraw a = draw_trial(4, 3, 4, 7, 2), b = draw_trial(4, 3, 4, 7, 2);
  CHECK(a.H == b.H);
  CHECK(a.symbols == b.symbols);
  CHECK_FALSE(draw_trial(4, 3, 4, 7, 3).H == a.H);
}

TEST_CASE("instance construction") {
  CHECK(alpha_from_snr_db(20) == doctest::Approx(0.01));
  CHECK(alpha_from_snr_db(0) == 1.0);
  const Constellation c = Constellation::qam16();
  const TrialDraw d = draw_trial(5, 3, 16, 8, 0);
  const MimoInstance m = make_instance(d, c, 0.04);
  CHECK(m.alpha == 0.04);
  for (std::size_t n = 0; n < 5; ++n) {
    std::complex<double> x = 0.2 * d.noise[n].value();
    for (std::size_t k = 0; k < 3; ++k) x += d.H(n, k).value() * c.points()[d.symbols[k]];
    CHECK(std::abs(m.x[n].value() - x) < 1e-14);
  }
}

TEST_CASE("operation counts do not depend on the thread count") {
  BenchConfig one = small_config();
  BenchConfig many = small_config();
  many.threads = 4;
  CHECK(flops_csv(one) == flops_csv(many));
  CHECK(flops_csv(one).rfind("K,N,detector,phase,cmul,cadd,cdiv,csqrt,trials\n", 0) == 0);
}

TEST_CASE("operation count structure") {
  const std::vector<BenchRow> rows = flop_sweep(small_config());
  CHECK(rows.size() == 2 * 3 * 3);
  for (std::size_t k : {2u, 4u}) {
    for (DetectorKind d : {DetectorKind::recursive, DetectorKind::sqrtfree, DetectorKind::oracle}) {
      const BenchRow& i = find(rows, k, d, Phase::init);
      const BenchRow& o = find(rows, k, d, Phase::osic);
      const BenchRow& t = find(rows, k, d, Phase::total);
      CHECK(t.N == k + 1);
      CHECK(t.trials == 12);
      CHECK(i.counts.cmul + o.counts.cmul == t.counts.cmul);
      CHECK(i.counts.cdiv + o.counts.cdiv == t.counts.cdiv);
    }
    const BenchRow& sq = find(rows, k, DetectorKind::sqrtfree, Phase::total);
    CHECK(sq.counts.cdiv == 0);
    CHECK(sq.counts.csqrt == 0);
    CHECK(find(rows, k, DetectorKind::recursive, Phase::total).counts.cdiv == 12 * k);
  }
}

TEST_CASE("symbol error rates") {
  BenchConfig cfg = small_config();
  cfg.K_list = {4};
  cfg.trials = 60;
  cfg.snr_db_list = {0, 40};
  const BerReport rep = ber_sweep(cfg);
  REQUIRE(rep.rows.size() == 6);
  for (const BerRow& r : rep.rows) CHECK(r.total == 240);
  const BerRow& low = rep.rows[0];
  const BerRow& high = rep.rows[3];
  CHECK(low.snr_db == 0);
  CHECK(high.snr_db == 40);
  CHECK(low.errors > high.errors);
  CHECK_FALSE(rep.warnings.empty());  // 40 dB has (almost) no errors
  for (std::size_t s = 0; s < 2; ++s) {
    CHECK(rep.rows[3 * s].errors == rep.rows[3 * s + 1].errors);
    CHECK(rep.rows[3 * s].errors == rep.rows[3 * s + 2].errors);
  }

  BenchConfig many = cfg;
  many.threads = 3;
  CHECK(ber_csv(cfg) == ber_csv(many));
  CHECK(ber_csv(cfg).rfind("snr_db,detector,errors,total,ber\n", 0) == 0);
}

TEST_CASE("noiseless link has no symbol errors") {
  BenchConfig cfg;
  cfg.K_list = {4};
  cfg.trials = 200;
  cfg.snr_db_list = {120};  // sigma_n^2 = 1e-12
  for (const BerRow& r : ber_sweep(cfg).rows) CHECK(r.errors == 0);
}

TEST_CASE("config validation") {
  BenchConfig cfg;
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = BenchConfig{};
  cfg.K_list = {};
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = BenchConfig{};
  cfg.K_list = {0};
  CHECK_THROWS_AS(flop_sweep(cfg), InputError);
  cfg = BenchConfig{};
  cfg.detectors = {};
  CHECK_THROWS_AS(cfg.validate(), InputError);
}
