#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>

#include "invldm/bench.hpp"
#include "invldm/divfree.hpp"
#include "invldm/inv_ldm.hpp"
#include "invldm/random.hpp"
#include "invldm/vblast.hpp"
#include "invldm/wide_givens.hpp"
#include "oracles.hpp"

namespace invldm::acceptance {

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Stream contents without the trailing "; " separator.
std::string items(const std::ostringstream& os) {
  std::string s = os.str();
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "; ") == 0) s.resize(s.size() - 2);
  return s;
}

ComplexMatrix random_gram(std::size_t k, real_t alpha, std::uint64_t seed) {
  return gram_regularized(generate_channel(k, k, seed), alpha);
}

std::vector<std::size_t> random_schedule(std::size_t k, SeededStream& rng) {
  std::vector<std::size_t> s;
  while (k > 0) {
    const std::size_t b = std::min(k, 1 + rng.index(3));
    s.push_back(b);
    k -= b;
  }
  return s;
}

Outcome factorization_correctness() {
  double worst[4] = {0, 0, 0, 0};
  bool ok = true;
  for (std::size_t i = 0; i < 200; ++i) {
    const std::size_t K = 1 + i % 16;
    const real_t alpha = i % 2 ? 1.0 : 0.01;
    const ComplexMatrix H = generate_channel(K, K, derive_seed(0xA1, i));
    const ComplexMatrix R = gram_regularized(H, alpha);
    const oracle::Mat Ro = oracle::gram(oracle::from(H), alpha);
    SeededStream rng(derive_seed(0xA1A1, i));
    const auto schedule = random_schedule(K, rng);

    const InvLdmFactors ldm = inv_ldm_factorize(R, schedule);
    const ComplexMatrix q[4] = {assemble_q(divfree_ldl_hermitian(R)),
                                assemble_q(divfree_factorize(R, schedule)), assemble_inverse(ldm),
                                assemble_inverse(to_inv_lu(ldm))};
    for (int m = 0; m < 4; ++m) {
      const double res = oracle::inverse_residual(oracle::from(q[m]), Ro);
      worst[m] = std::max(worst[m], res / static_cast<double>(K));
      ok = ok && res <= 1e-9 * static_cast<double>(K);
    }
  }
  return {ok, "max residual/K: divfree-ldl " + fmt("%.2e", worst[0]) + ", divfree-blocked " +
                  fmt("%.2e", worst[1]) + ", inv_ldm " + fmt("%.2e", worst[2]) + ", inv_lu " +
                  fmt("%.2e", worst[3]) + " (limit 1e-9)"};
}

Outcome order_two_extension() {
  SeededStream rng(0xA2);
  double adopted = 0;
  std::size_t literal_failures = 0;
  for (int t = 0; t < 50; ++t) {
    const oracle::cd r11 = rng.complex_normal() + 2.0, r12 = rng.complex_normal(),
                     r21 = rng.complex_normal(), r22 = rng.complex_normal() + 2.0;
    const oracle::Mat direct = oracle::inverse_2x2(r11, r12, r21, r22);

    const DivFreeFactors f = divfree_init(r11);
    const Complex y[1] = {std::conj(r21)};
    const Complex v[1] = {r12};
    const DivFreeFactors g = divfree_extend_vector(f, v, y, r22);
    adopted = std::max(adopted, oracle::max_abs_diff(oracle::from(assemble_q(g)), direct));

    // Same layout with the printed reciprocal 1/(delta t - s) in place of eta.
    const oracle::cd delta = r11;
    const oracle::cd s = r21 * r12;
    const oracle::cd eta = 1.0 / (delta * r22 - s);
    oracle::Mat L(2, 2), M(2, 2);
    L(0, 0) = 1; L(0, 1) = -r12; L(1, 1) = delta;
    M(0, 0) = 1; M(0, 1) = -std::conj(r21); M(1, 1) = std::conj(delta);
    const oracle::Mat literal = oracle::weighted_form(L, {eta, 1.0}, M, delta * eta);
    if (oracle::max_abs_diff(literal, direct) > 1e-12) ++literal_failures;
  }
  return {adopted <= 1e-12 && literal_failures == 50,
          "adopted eta max error " + fmt("%.2e", adopted) +
              " (limit 1e-12); literal reciprocal fails the oracle on " +
              std::to_string(literal_failures) + "/50"};
}

Outcome division_freedom() {
  std::ostringstream detail;
  bool ok = true;
  for (std::size_t K : {4, 16, 64}) {
    const ComplexMatrix R = random_gram(K, 0.1, derive_seed(0xA3, K));
    AuditContext ctx;
    const auto run = audited_region(ctx, [&] { return divfree_ldl_hermitian(R); });
    ok = ok && run.counts.cdiv == 0 && run.counts.csqrt == 0;
    detail << "ldl K=" << K << " div/sqrt " << run.counts.cdiv << "/" << run.counts.csqrt << "; ";
  }
  const Constellation c = Constellation::qpsk();
  AuditContext ctx;
  const auto run = audited_region(ctx, [&] {
    for (std::size_t t = 0; t < 100; ++t) {
      const MimoInstance inst = make_instance(draw_trial(4, 4, 4, 0xA3, t), c, alpha_from_snr_db(20));
      detect_sqrtfree(inst, c);
    }
  });
  ok = ok && run.counts.cdiv == 0 && run.counts.csqrt == 0;
  detail << "sqrtfree detection x100 div/sqrt " << run.counts.cdiv << "/" << run.counts.csqrt;
  return {ok, detail.str()};
}

Outcome division_saving() {
  std::ostringstream detail;
  bool ok = true;
  const Constellation c = Constellation::qpsk();
  for (std::size_t K : {2, 4, 8, 16, 64}) {
    const MimoInstance inst = make_instance(draw_trial(K, K, 4, 0xA4, K), c, alpha_from_snr_db(20));
    AuditContext ctx;
    const auto fast = audited_region(ctx, [&] { return detect_recursive(inst, c); });
    const ComplexMatrix R = gram_regularized(inst.H, inst.alpha);
    const auto base = audited_region(ctx, [&] { return assemble_inverse(inv_ldm_factorize(R)); });
    const OpCounts& init = fast.result.init_counts;
    ok = ok && init.cdiv == 1 && init.csqrt == 0 && base.counts.cdiv >= K;
    detail << "K=" << K << " " << init.cdiv << " vs " << base.counts.cdiv << "; ";
  }
  return {ok, "init divisions (division-free vs conventional): " + items(detail)};
}

Outcome complexity() {
  std::ostringstream detail;
  bool ok = true;
  double prev = 0;
  for (std::size_t K : {16, 32, 64}) {
    const ComplexMatrix R = random_gram(K, 0.1, derive_seed(0xA5, K));
    AuditContext ctx;
    const auto init = audited_region(ctx, [&] { return divfree_ldl_hermitian(R); });
    const auto q = audited_region(ctx, [&] { return assemble_q(init.result); });
    const double k3 = std::pow(static_cast<double>(K), 3);
    const double a = static_cast<double>(init.counts.cmul) / (k3 / 3);
    const double b = static_cast<double>(init.counts.cmul + q.counts.cmul) / (k3 / 2);
    ok = ok && std::abs(a - 1) <= 0.2 && std::abs(b - 1) <= 0.2;
    detail << "K=" << K << " init/(K^3/3)=" << fmt("%.3f", a) << " total/(K^3/2)=" << fmt("%.3f", b);
    if (prev > 0) {
      const double ratio = static_cast<double>(init.counts.cmul) / prev;
      ok = ok && ratio >= 7 && ratio <= 9;
      detail << " growth=" << fmt("%.2f", ratio);
    }
    detail << "; ";
    prev = static_cast<double>(init.counts.cmul);
  }
  return {ok, items(detail)};
}

// Relative Frobenius distance between Q assembled with and without rescaling.
double rescaling_effect(const ComplexMatrix& R, bool hermitian) {
  const auto q = [&](bool enabled) {
    const RescalePolicy policy{enabled, 0};
    return oracle::from(assemble_q(hermitian ? divfree_ldl_hermitian(R, policy)
                                             : divfree_factorize(R, {}, policy)));
  };
  const oracle::Mat plain = q(false);
  return oracle::frobenius_diff(q(true), plain) / oracle::frobenius(plain);
}

Outcome scaling_window() {
  const std::size_t K = 64;
  double lo = INFINITY, hi = 0;
  const ComplexMatrix C = ComplexMatrix::hermitian(oracle::to_library(oracle::controlled_pivot_matrix(K)));
  for (const ComplexMatrix& R : {random_gram(K, 0.1, 0xA6), C}) {
    RescalePolicy policy;
    DivFreeFactors f = rescale(divfree_init(R(0, 0), true), policy);
    for (std::size_t k = 1;; ++k) {
      const double n = std::norm(f.delta.value());
      lo = std::min(lo, n);
      hi = std::max(hi, n);
      if (k == K) break;
      ComplexVector v(k);
      for (std::size_t m = 0; m < k; ++m) v[m] = R(m, k);
      f = rescale(divfree_extend_hermitian(f, v, real(R(k, k))), policy);
    }
  }
  // Without rescaling the denominator of a generic chain squares every step
  // and leaves the double range near K = 10, so the K = 64 comparison runs on
  // the controlled-pivot matrix; generic matrices are compared at K = 6.
  const ComplexMatrix G = random_gram(6, 0.1, 0xA6);
  const double diffs[4] = {rescaling_effect(C, true), rescaling_effect(C, false),
                           rescaling_effect(G, true), rescaling_effect(G, false)};
  const double worst = *std::max_element(std::begin(diffs), std::end(diffs));
  return {lo >= 0.25 && hi <= 4 && worst <= 1e-12,
          "|delta|^2 in [" + fmt("%.3g", lo) + ", " + fmt("%.3g", hi) +
              "] after every step of two K=64 chains; Q rescaled vs not, max rel diff " +
              fmt("%.2e", worst) + " (limit 1e-12)"};
}

Outcome triangularization_contracts() {
  SeededStream rng(0xA7);
  double worst = 0;
  bool pattern = true, form = true;
  OpCounts counts;
  for (std::size_t t = 0; t < 1000; ++t) {
    const std::size_t k = 1 + rng.index(12);
    const std::size_t p = rng.index(k);
    ComplexMatrix L(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i; j < k; ++j) L(i, j) = rng.complex_normal();
    WeightedTriangular w{ComplexMatrix(k, k), {}, Real(0.5 + 1.5 * rng.uniform())};
    for (std::size_t j = 0; j < k; ++j) w.d.emplace_back(0.5 + 1.5 * rng.uniform());
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t src = i < p ? i : (i + 1 < k ? i + 1 : p);
      for (std::size_t j = 0; j < k; ++j) w.L(i, j) = L(src, j);
    }
    std::vector<oracle::cd> d0;
    for (const Real& x : w.d) d0.emplace_back(x.value());
    const oracle::Mat L0 = oracle::from(w.L);
    const oracle::Mat before = oracle::weighted_form(L0, d0, L0, w.delta.value());

    RescalePolicy policy;
    AuditContext ctx;
    const auto run = audited_region(ctx, [&] { return block_triangularize(w, policy); });
    counts += run.counts;
    const WeightedTriangular& out = run.result.w;
    std::vector<oracle::cd> d1;
    for (const Real& x : out.d) d1.emplace_back(x.value());
    const oracle::Mat L1 = oracle::from(out.L);
    const double err = oracle::frobenius_diff(oracle::weighted_form(L1, d1, L1, out.delta.value()), before);
    worst = std::max(worst, err / static_cast<double>(k));
    form = form && err <= 1e-10 * static_cast<double>(k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < i; ++j) pattern = pattern && out.L(i, j) == Complex();
  }
  return {form && pattern && counts.cdiv == 0 && counts.csqrt == 0,
          "1000 calls with rescaling; form error/k max " + fmt("%.2e", worst) + " (limit 1e-10); zero pattern " +
              (pattern ? "exact" : "VIOLATED") + "; div/sqrt " + std::to_string(counts.cdiv) + "/" +
              std::to_string(counts.csqrt)};
}

Outcome detector_equivalence() {
  const Constellation c = Constellation::qpsk();
  std::size_t total = 0, unsafe = 0, mismatched = 0;
  for (real_t snr : {10.0, 20.0, 30.0}) {
    for (std::size_t t = 0; t < 1000; ++t) {
      const MimoInstance inst = make_instance(draw_trial(4, 4, 4, 0xA8, t), c, alpha_from_snr_db(snr));
      const DetectionResult a = detect_recursive(inst, c);
      const DetectionResult b = detect_sqrtfree(inst, c);
      const DetectionResult o = detect_oracle(inst, c);
      ++total;
      if (!(o.min_diagonal_gap > 1e-9)) {
        ++unsafe;
        continue;
      }
      const bool same = a.order == o.order && b.order == o.order &&
                        a.symbol_indices == o.symbol_indices && b.symbol_indices == o.symbol_indices;
      mismatched += !same;
    }
  }
  const double frac = static_cast<double>(unsafe) / static_cast<double>(total);
  return {mismatched == 0 && frac < 0.01,
          std::to_string(total - unsafe) + " gap-safe trials, " + std::to_string(mismatched) +
              " mismatches; gap-unsafe " + std::to_string(unsafe) + "/" + std::to_string(total)};
}

Outcome per_iteration_oracle() {
  const Constellation c = Constellation::qpsk();
  double worst = 0;
  std::size_t checks = 0;
  for (std::size_t t = 0; t < 100; ++t) {
    const MimoInstance inst = make_instance(draw_trial(4, 4, 4, 0xA9, t), c, alpha_from_snr_db(20));
    const oracle::Mat R = oracle::gram(oracle::from(inst.H), inst.alpha);
    DetectorOptions opt;
    opt.on_iteration = [&](const std::vector<std::size_t>& left, const ComplexMatrix& q) {
      const oracle::Mat direct = oracle::inverse(oracle::principal(R, left));
      worst = std::max(worst, oracle::frobenius_diff(oracle::from(q), direct));
      ++checks;
    };
    detect_recursive(inst, c, opt);
    detect_sqrtfree(inst, c, opt);
  }
  return {checks == 800 && worst <= 1e-9,
          std::to_string(checks) + " iterations, max ||Q - R_sub^-1||_F " + fmt("%.2e", worst) +
              " (limit 1e-9)"};
}

Outcome reproducibility() {
  BenchConfig cfg;
  cfg.K_list = {2, 4, 8};
  cfg.trials = 20;
  cfg.seed = 7;
  cfg.snr_db_list = {10, 20};
  const auto flops = [&](unsigned threads) {
    BenchConfig c = cfg;
    c.threads = threads;
    std::ostringstream os;
    write_flops_csv(os, flop_sweep(c));
    return os.str();
  };
  const auto ber = [&](unsigned threads) {
    BenchConfig c = cfg;
    c.threads = threads;
    std::ostringstream os;
    write_ber_csv(os, ber_sweep(c).rows);
    return os.str();
  };
  const std::string f1 = flops(1), f2 = flops(1), f3 = flops(4);
  const std::string b1 = ber(1), b2 = ber(1), b3 = ber(4);
  const bool ok = f1 == f2 && f1 == f3 && b1 == b2 && b1 == b3;
  return {ok, std::string("flops CSV ") + (f1 == f2 && f1 == f3 ? "identical" : "DIFFERS") +
                  " across repeats and 1/4 threads (" + std::to_string(f1.size()) + " bytes); ber CSV " +
                  (b1 == b2 && b1 == b3 ? "identical" : "DIFFERS") + " (" + std::to_string(b1.size()) +
                  " bytes)"};
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
  double time_limit;  // seconds, 0 = none
};

const Criterion& criterion(int id) {
  static const Criterion table[kCriteria] = {
      {"factorization correctness", factorization_correctness, 10},
      {"eta resolution on order-2 extensions", order_two_extension, 1},
      {"division and square-root freedom", division_freedom, 0},
      {"division saving in recursive init", division_saving, 0},
      {"complexity leading terms", complexity, 30},
      {"rescaling window", scaling_window, 0},
      {"block triangularization contracts", triangularization_contracts, 0},
      {"detector equivalence", detector_equivalence, 0},
      {"per-iteration Q oracle", per_iteration_oracle, 0},
      {"bench reproducibility", reproducibility, 0},
  };
  return table[id - 1];
}

}  // namespace

std::vector<int> selftest_subset() { return {2, 3, 4, 6, 7, 9}; }

CriterionResult run_criterion(int id) {
  CriterionResult r;
  r.id = id;
  if (id < 1 || id > kCriteria) {
    r.title = "unknown";
    r.detail = "no criterion " + std::to_string(id);
    return r;
  }
  const Criterion& c = criterion(id);
  r.title = c.title;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Outcome o = c.run();
    r.passed = o.passed;
    r.detail = o.detail;
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.time_limit > 0 && r.seconds >= c.time_limit) {
    r.passed = false;
    r.detail += "; runtime limit " + fmt("%.0f", c.time_limit) + " s exceeded";
  }
  return r;
}

void print(std::ostream& os, const CriterionResult& r) {
  os << (r.passed ? "[PASS] " : "[FAIL] ") << 'A' << r.id << ' ' << r.title << ": " << r.detail
     << " (" << fmt("%.2f", r.seconds) << " s)\n";
}

}  // namespace invldm::acceptance
