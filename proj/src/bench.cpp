#include "invldm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "invldm/errors.hpp"
#include "invldm/matrix_io.hpp"
#include "invldm/random.hpp"

namespace invldm {

void BenchConfig::validate() const {
  if (K_list.empty()) throw InputError("bench: K list is empty");
  if (std::find(K_list.begin(), K_list.end(), 0) != K_list.end()) throw InputError("bench: K must be >= 1");
  if (trials == 0) throw InputError("bench: trials must be >= 1");
  if (snr_db_list.empty()) throw InputError("bench: SNR list is empty");
  if (detectors.empty()) throw InputError("bench: no detectors selected");
  Constellation::by_name(constellation);
}

TrialDraw draw_trial(std::size_t n, std::size_t k, std::size_t constellation_size,
                     std::uint64_t master_seed, std::uint64_t trial) {
  SeededStream rng(derive_seed(master_seed, trial));
  TrialDraw d{ComplexMatrix(n, k), std::vector<std::size_t>(k), ComplexVector(n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) d.H(i, j) = rng.complex_normal();
  for (std::size_t& s : d.symbols) s = rng.index(constellation_size);
  for (Complex& z : d.noise) z = rng.complex_normal();
  return d;
}

real_t alpha_from_snr_db(real_t snr_db) { return std::pow(10.0, -snr_db / 10.0); }

MimoInstance make_instance(const TrialDraw& draw, const Constellation& c, real_t alpha) {
  const std::size_t n = draw.H.rows();
  const real_t sigma = std::sqrt(alpha);
  MimoInstance inst{draw.H, ComplexVector(n), alpha};
  for (std::size_t i = 0; i < n; ++i) {
    complex_t acc = sigma * draw.noise[i].value();
    for (std::size_t j = 0; j < draw.H.cols(); ++j) {
      acc += draw.H(i, j).value() * c.points()[draw.symbols[j]];
    }
    inst.x[i] = acc;
  }
  return inst;
}

std::string phase_name(Phase p) {
  switch (p) {
    case Phase::init: return "init";
    case Phase::osic: return "osic";
    case Phase::total: return "total";
  }
  return "?";
}

namespace {

unsigned worker_count(unsigned requested, std::size_t trials) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, trials));
}

// Runs body(worker, trial) with trials dealt round-robin to the workers.
template <class Body>
void parallel_trials(unsigned workers, std::size_t trials, Body&& body) {
  if (workers <= 1) {
    for (std::size_t t = 0; t < trials; ++t) body(0u, t);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t t = w; t < trials; t += workers) body(w, t);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<BenchRow> flop_sweep(const BenchConfig& cfg) {
  cfg.validate();
  const Constellation c = Constellation::by_name(cfg.constellation);
  const real_t alpha = alpha_from_snr_db(cfg.snr_db_list.front());
  const unsigned workers = worker_count(cfg.threads, cfg.trials);
  const std::size_t nd = cfg.detectors.size();

  std::vector<BenchRow> rows;
  for (std::size_t K : cfg.K_list) {
    const std::size_t N = K + cfg.extra_receive;
    struct Partial {
      std::vector<OpCounts> init, osic;
      std::vector<double> seconds;
    };
    std::vector<Partial> partial(workers, Partial{std::vector<OpCounts>(nd), std::vector<OpCounts>(nd),
                                                  std::vector<double>(nd, 0.0)});
    parallel_trials(workers, cfg.trials, [&](unsigned w, std::size_t t) {
      const MimoInstance inst = make_instance(draw_trial(N, K, c.points().size(), cfg.seed, t), c, alpha);
      AuditContext ctx;
      for (std::size_t d = 0; d < nd; ++d) {
        const auto start = std::chrono::steady_clock::now();
        const auto run = audited_region(ctx, [&] { return detect(cfg.detectors[d], inst, c); });
        partial[w].seconds[d] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        partial[w].init[d] += run.result.init_counts;
        partial[w].osic[d] += run.result.osic_counts;
      }
    });
    for (std::size_t d = 0; d < nd; ++d) {
      OpCounts init, osic;
      double seconds = 0;
      for (const Partial& p : partial) {
        init += p.init[d];
        osic += p.osic[d];
        seconds += p.seconds[d];
      }
      const DetectorKind kind = cfg.detectors[d];
      rows.push_back({K, N, kind, Phase::init, init, cfg.trials, seconds});
      rows.push_back({K, N, kind, Phase::osic, osic, cfg.trials, seconds});
      rows.push_back({K, N, kind, Phase::total, init + osic, cfg.trials, seconds});
    }
  }
  return rows;
}

BerReport ber_sweep(const BenchConfig& cfg) {
  cfg.validate();
  const Constellation c = Constellation::by_name(cfg.constellation);
  const std::size_t K = cfg.K_list.front();
  const std::size_t N = K + cfg.extra_receive;
  const std::size_t ns = cfg.snr_db_list.size();
  const std::size_t nd = cfg.detectors.size();
  const unsigned workers = worker_count(cfg.threads, cfg.trials);

  std::vector<std::vector<std::uint64_t>> errors(workers, std::vector<std::uint64_t>(ns * nd, 0));
  parallel_trials(workers, cfg.trials, [&](unsigned w, std::size_t t) {
    const TrialDraw draw = draw_trial(N, K, c.points().size(), cfg.seed, t);
    for (std::size_t s = 0; s < ns; ++s) {
      const MimoInstance inst = make_instance(draw, c, alpha_from_snr_db(cfg.snr_db_list[s]));
      for (std::size_t d = 0; d < nd; ++d) {
        const DetectionResult r = detect(cfg.detectors[d], inst, c);
        for (std::size_t j = 0; j < K; ++j) errors[w][s * nd + d] += r.symbol_indices[j] != draw.symbols[j];
      }
    }
  });

  BerReport report;
  const std::uint64_t total = static_cast<std::uint64_t>(cfg.trials) * K;
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t d = 0; d < nd; ++d) {
      std::uint64_t e = 0;
      for (const auto& per_worker : errors) e += per_worker[s * nd + d];
      report.rows.push_back({cfg.snr_db_list[s], cfg.detectors[d], e, total});
      if (e < 10) {
        report.warnings.push_back("snr " + format_real(cfg.snr_db_list[s]) + " dB, " +
                                  detector_name(cfg.detectors[d]) + ": " + std::to_string(e) +
                                  " symbol errors in " + std::to_string(total) +
                                  " symbols; increase --trials for a reliable estimate");
      }
    }
  }
  return report;
}

void write_flops_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "K,N,detector,phase,cmul,cadd,cdiv,csqrt,trials\n";
  for (const BenchRow& r : rows) {
    const auto avg = [&](std::uint64_t v) {
      return format_real(static_cast<double>(v) / static_cast<double>(r.trials));
    };
    os << r.K << ',' << r.N << ',' << detector_name(r.detector) << ',' << phase_name(r.phase) << ','
       << avg(r.counts.cmul) << ',' << avg(r.counts.cadd) << ',' << avg(r.counts.cdiv) << ','
       << avg(r.counts.csqrt) << ',' << r.trials << '\n';
  }
}

void write_ber_csv(std::ostream& os, const std::vector<BerRow>& rows) {
  os << "snr_db,detector,errors,total,ber\n";
  for (const BerRow& r : rows) {
    os << format_real(r.snr_db) << ',' << detector_name(r.detector) << ',' << r.errors << ','
       << r.total << ',' << format_real(r.ber()) << '\n';
  }
}

}  // namespace invldm
