// Command-line front end: factorize, detect, bench-flops, bench-ber, selftest.
//
// Exit codes: 0 success, 1 usage or input error, 2 numerical error,
// 3 failed selftest.

#include <algorithm>
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "acceptance.hpp"
#include "invldm/audit.hpp"
#include "invldm/bench.hpp"
#include "invldm/divfree.hpp"
#include "invldm/errors.hpp"
#include "invldm/inv_ldm.hpp"
#include "invldm/matrix_io.hpp"
#include "invldm/vblast.hpp"
#include "invldm/version.hpp"

using namespace invldm;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitSelftest = 3;

bool parse_switch(const std::string& v) {
  if (v == "on") return true;
  if (v == "off") return false;
  throw InputError("expected on|off, got '" + v + "'");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write '" + path + "'");
  return os;
}

struct FactorizeArgs {
  std::string input;
  std::string mode = "divfree";
  std::vector<std::size_t> schedule;
  std::string rescale = "on";
  bool hermitian = false;
  std::string output;
};

int run_factorize(const FactorizeArgs& a) {
  const ComplexMatrix R = read_matrix_csv(a.input);
  AuditContext ctx;
  ComplexMatrix q(1, 1);
  OpCounts counts;
  if (a.mode == "divfree") {
    const RescalePolicy policy{parse_switch(a.rescale), 0};
    const auto run = audited_region(ctx, [&] {
      return a.hermitian ? divfree_ldl_hermitian(R, policy) : divfree_factorize(R, a.schedule, policy);
    });
    counts = run.counts;
    q = assemble_q(run.result);
    if (!a.output.empty()) {
      auto os = open_output(a.output + ".factors.csv");
      write_divfree(os, run.result);
    }
    real_t max_lt = 0, max_mt = 0;
    for (const Complex& x : run.result.lt.data()) max_lt = std::max(max_lt, std::abs(x.value()));
    for (const Complex& x : run.result.mt().data()) max_mt = std::max(max_mt, std::abs(x.value()));
    std::cout << "delta=" << format_complex(run.result.delta.value())
              << "\naccumulated_shift=" << run.result.accumulated_shift
              << "\nmax_abs_lt=" << format_real(max_lt) << "\nmax_abs_mt=" << format_real(max_mt) << '\n';
  } else if (a.mode == "ldm" || a.mode == "lu") {
    const auto run = audited_region(ctx, [&] { return inv_ldm_factorize(R, a.schedule); });
    counts = run.counts;
    q = assemble_inverse(run.result);
    if (!a.output.empty()) {
      if (a.mode == "ldm") {
        write_matrix_csv(a.output + ".L.csv", run.result.L);
        write_matrix_csv(a.output + ".D.csv", ComplexMatrix::column(run.result.D));
        write_matrix_csv(a.output + ".M.csv", run.result.M);
      } else {
        const InvLuFactors lu = to_inv_lu(run.result);
        write_matrix_csv(a.output + ".L.csv", lu.L);
        write_matrix_csv(a.output + ".U.csv", lu.U);
      }
    }
  } else {
    throw InputError("unknown mode '" + a.mode + "' (ldm|lu|divfree)");
  }
  if (!a.output.empty()) write_matrix_csv(a.output + ".inverse.csv", q);
  std::cout << "order=" << R.rows() << "\nresidual_fro=" << format_real(inverse_residual(q, R))
            << "\nops " << counts << '\n';
  return 0;
}

struct DetectArgs {
  std::string h, x;
  double alpha = 0;
  std::string detector = "sqrtfree";
  std::string constellation = "qpsk";
  bool normalize = false;
  std::string output;
};

int run_detect(const DetectArgs& a) {
  const ComplexMatrix H = read_matrix_csv(a.h);
  const ComplexMatrix X = read_matrix_csv(a.x);
  if (X.rows() != 1 && X.cols() != 1) throw DimensionError("--x must hold a single row or column");
  const ComplexVector x = X.rows() == 1 ? ComplexVector(X.data().begin(), X.data().end()) : X.col(0);
  const MimoInstance inst{H, x, a.alpha};
  const Constellation c = Constellation::by_name(a.constellation);
  DetectorOptions opt;
  opt.normalize_soft = a.normalize;

  AuditContext ctx;
  const auto run = audited_region(ctx, [&] { return detect(detector_from_name(a.detector), inst, c, opt); });
  if (a.output.empty()) {
    write_detection_csv(std::cout, run.result);
  } else {
    auto os = open_output(a.output);
    write_detection_csv(os, run.result);
  }
  std::cerr << "detector=" << a.detector << " gram: " << run.result.gram_counts
            << "\ninit: " << run.result.init_counts << "\nosic: " << run.result.osic_counts
            << "\ntotal: " << run.counts << '\n';
  return 0;
}

struct BenchArgs {
  std::vector<std::size_t> K;
  std::size_t extra_receive = 0;
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  std::vector<double> snr;
  std::vector<std::string> detectors{"recursive", "sqrtfree", "oracle"};
  std::string constellation = "qpsk";
  unsigned threads = 1;
  std::string output;
};

BenchConfig to_config(const BenchArgs& a) {
  BenchConfig cfg;
  cfg.K_list = a.K;
  cfg.extra_receive = a.extra_receive;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.snr_db_list = a.snr;
  cfg.detectors.clear();
  for (const auto& d : a.detectors) cfg.detectors.push_back(detector_from_name(d));
  cfg.constellation = a.constellation;
  cfg.threads = a.threads;
  return cfg;
}

int run_bench_flops(const BenchArgs& a) {
  const std::vector<BenchRow> rows = flop_sweep(to_config(a));
  auto os = open_output(a.output);
  write_flops_csv(os, rows);
  for (const BenchRow& r : rows) {
    if (r.phase == Phase::total) {
      std::cerr << "K=" << r.K << ' ' << detector_name(r.detector) << " wall_time="
                << format_real(r.wall_time) << " s\n";
    }
  }
  std::cerr << "wrote " << rows.size() << " rows to " << a.output << '\n';
  return 0;
}

int run_bench_ber(const BenchArgs& a) {
  const BerReport report = ber_sweep(to_config(a));
  auto os = open_output(a.output);
  write_ber_csv(os, report.rows);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << "wrote " << report.rows.size() << " rows to " << a.output << '\n';
  return 0;
}

int run_selftest(bool all) {
  std::vector<int> ids = acceptance::selftest_subset();
  if (all) {
    ids.clear();
    for (int i = 1; i <= acceptance::kCriteria; ++i) ids.push_back(i);
  }
  int failed = 0;
  for (int id : ids) {
    const auto r = acceptance::run_criterion(id);
    acceptance::print(std::cout, r);
    failed += !r.passed;
  }
  return failed ? kExitSelftest : 0;
}

void add_bench_options(CLI::App* cmd, BenchArgs& a, const std::string& default_output) {
  a.output = default_output;
  cmd->add_option("--K", a.K, "Stream counts, comma-separated")->delimiter(',')->required();
  cmd->add_option("--extra-receive", a.extra_receive, "Receive antennas beyond K (N = K + extra)");
  cmd->add_option("--trials", a.trials, "Monte-Carlo trials")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Master seed")->capture_default_str();
  cmd->add_option("--snr", a.snr, "SNR points in dB, comma-separated")->delimiter(',')->capture_default_str();
  cmd->add_option("--detectors", a.detectors, "recursive,sqrtfree,oracle")->delimiter(',')->capture_default_str();
  cmd->add_option("--constellation", a.constellation, "qpsk|bpsk|qam16")->capture_default_str();
  cmd->add_option("--threads", a.threads, "Worker threads (0: all cores)")->capture_default_str();
  cmd->add_option("--output", a.output, "CSV output path")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Division-free inverse LDM factorization and V-BLAST detection"};
  app.set_version_flag("--version", std::string("invldm ") + kVersion);
  app.require_subcommand(1);

  FactorizeArgs fa;
  auto* fac = app.add_subcommand("factorize", "Factor the inverse of a matrix and report the residual");
  fac->add_option("--input", fa.input, "Matrix CSV")->required()->check(CLI::ExistingFile);
  fac->add_option("--mode", fa.mode, "ldm|lu|divfree")->check(CLI::IsMember({"ldm", "lu", "divfree"}))->capture_default_str();
  fac->add_option("--schedule", fa.schedule, "Block sizes, comma-separated")->delimiter(',');
  fac->add_option("--rescale", fa.rescale, "Power-of-two rescaling (divfree)")->check(CLI::IsMember({"on", "off"}))->capture_default_str();
  fac->add_flag("--hermitian", fa.hermitian, "Hermitian positive definite input (divfree LDL)");
  fac->add_option("--output", fa.output, "Prefix for factor and inverse CSV files");

  DetectArgs da;
  auto* det = app.add_subcommand("detect", "Run one OSIC detection");
  det->add_option("--H", da.h, "Channel CSV (N x K)")->required()->check(CLI::ExistingFile);
  det->add_option("--x", da.x, "Received vector CSV (N x 1 or 1 x N)")->required()->check(CLI::ExistingFile);
  det->add_option("--alpha", da.alpha, "sigma_n^2 / sigma_s^2")->required();
  det->add_option("--detector", da.detector, "recursive|sqrtfree|oracle")->check(CLI::IsMember({"recursive", "sqrtfree", "oracle"}))->capture_default_str();
  det->add_option("--constellation", da.constellation, "qpsk|bpsk|qam16")->capture_default_str();
  det->add_flag("--normalize", da.normalize, "Divide scaled soft estimates by their scale");
  det->add_option("--output", da.output, "Detection CSV (default: stdout)");

  BenchArgs flops_args;
  flops_args.snr = {20.0};
  auto* flops = app.add_subcommand("bench-flops", "Audited operation counts per phase");
  add_bench_options(flops, flops_args, "flops.csv");

  BenchArgs ber_args;
  ber_args.snr = {10.0, 20.0, 30.0};
  ber_args.trials = 1000;
  auto* ber = app.add_subcommand("bench-ber", "Symbol error rate per SNR and detector");
  add_bench_options(ber, ber_args, "ber.csv");

  bool all = false;
  auto* self = app.add_subcommand("selftest", "Run the acceptance checks");
  self->add_flag("--all", all, "Run every criterion, not only the quick subset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*fac) return run_factorize(fa);
    if (*det) return run_detect(da);
    if (*flops) return run_bench_flops(flops_args);
    if (*ber) return run_bench_ber(ber_args);
    if (*self) return run_selftest(all);
  } catch (const SingularError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
