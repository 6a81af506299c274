#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "invldm/audit.hpp"
#include "invldm/vblast.hpp"

namespace invldm {

struct BenchConfig {
  std::vector<std::size_t> K_list{4};
  /// N = K + extra_receive.
  std::size_t extra_receive = 0;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  /// Operation counts use the first entry.
  std::vector<real_t> snr_db_list{20.0};
  std::vector<DetectorKind> detectors{DetectorKind::recursive, DetectorKind::sqrtfree,
                                      DetectorKind::oracle};
  std::string constellation = "qpsk";
  /// 0: hardware concurrency.
  unsigned threads = 1;

  /// Throws InputError for empty lists, trials = 0 or K = 0.
  void validate() const;
};

/// One trial's realization: channel, transmitted symbol indices and
/// unit-variance noise, all from derive_seed(seed, trial).
struct TrialDraw {
  ComplexMatrix H;
  std::vector<std::size_t> symbols;
  ComplexVector noise;
};
TrialDraw draw_trial(std::size_t n, std::size_t k, std::size_t constellation_size,
                     std::uint64_t master_seed, std::uint64_t trial);

/// alpha = sigma_n^2 / sigma_s^2 = 10^(-snr/10) with unit symbol energy.
real_t alpha_from_snr_db(real_t snr_db);

/// x = H s + sqrt(alpha) n.
MimoInstance make_instance(const TrialDraw& draw, const Constellation& c, real_t alpha);

enum class Phase { init, osic, total };
std::string phase_name(Phase p);

struct BenchRow {
  std::size_t K = 0;
  std::size_t N = 0;
  DetectorKind detector = DetectorKind::recursive;
  Phase phase = Phase::total;
  /// Summed over trials; the CSV reports sum / trials.
  OpCounts counts;
  std::size_t trials = 0;
  double wall_time = 0;
};

/// Audited operation counts per K, detector and phase (the Gram matrix is
/// excluded). Trials are split across threads, each with its own audit
/// context; sums do not depend on the split.
std::vector<BenchRow> flop_sweep(const BenchConfig& cfg);

struct BerRow {
  real_t snr_db = 0;
  DetectorKind detector = DetectorKind::recursive;
  std::uint64_t errors = 0;
  std::uint64_t total = 0;

  real_t ber() const { return total ? static_cast<real_t>(errors) / static_cast<real_t>(total) : 0; }
};

struct BerReport {
  std::vector<BerRow> rows;
  std::vector<std::string> warnings;
};

/// Symbol error rate per SNR and detector; every detector sees the same
/// channel, symbols and noise, and each trial keeps its draw across SNRs.
/// Uses the first K of the config.
BerReport ber_sweep(const BenchConfig& cfg);

/// K,N,detector,phase,cmul,cadd,cdiv,csqrt,trials
void write_flops_csv(std::ostream& os, const std::vector<BenchRow>& rows);
/// snr_db,detector,errors,total,ber
void write_ber_csv(std::ostream& os, const std::vector<BerRow>& rows);

}  // namespace invldm
