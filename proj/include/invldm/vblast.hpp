#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "invldm/audit.hpp"
#include "invldm/divfree.hpp"
#include "invldm/matrix.hpp"

namespace invldm {

/// Symbol alphabet with unit mean energy.
class Constellation {
 public:
  Constellation(std::string name, std::vector<complex_t> points);

  static Constellation qpsk();
  static Constellation bpsk();
  static Constellation qam16();
  /// "qpsk", "bpsk" or "qam16"; throws InputError otherwise.
  static Constellation by_name(const std::string& name);

  const std::string& name() const { return name_; }
  const std::vector<complex_t>& points() const { return points_; }

  /// Index of the point nearest to z / scale for scale > 0, found by
  /// minimizing scale |p|^2 - 2 Re(conj(p) z); no division. Ties go to the
  /// lowest index.
  std::size_t slice(Complex z, Real scale = Real(1.0)) const;

 private:
  std::string name_;
  std::vector<complex_t> points_;
  std::vector<real_t> energy_;
};

/// x = H s + n with alpha = sigma_n^2 / sigma_s^2.
struct MimoInstance {
  ComplexMatrix H;
  ComplexVector x;
  real_t alpha = 0;

  std::size_t streams() const { return H.cols(); }
  std::size_t antennas() const { return H.rows(); }
  /// Throws DimensionError unless N >= K and x has N entries, InputError
  /// for a negative alpha.
  void validate() const;
};

struct IterationRecord {
  std::size_t stream = 0;
  /// Positive scale of the soft estimate (delta for the square-root-free
  /// detector, 1 otherwise).
  real_t scale = 1;
  /// Tallies of this OSIC iteration (zero when no audit region is open).
  OpCounts counts;
};

struct DetectionResult {
  /// Streams in detection order (0-based).
  std::vector<std::size_t> order;
  /// Indexed by stream.
  std::vector<std::size_t> symbol_indices;
  std::vector<complex_t> symbols;
  std::vector<complex_t> soft_estimates;
  std::vector<real_t> soft_scale;
  std::vector<IterationRecord> iterations;
  OpCounts gram_counts;
  OpCounts init_counts;
  OpCounts osic_counts;
  /// Smallest gap between the two smallest diagonal entries of Q over all
  /// iterations with at least two candidates (infinity otherwise).
  real_t min_diagonal_gap = std::numeric_limits<real_t>::infinity();
};

/// Called at the start of every OSIC iteration with the undetected streams
/// (ascending) and the Q over them that the detector currently represents.
/// Runs with counting paused.
using IterationObserver =
    std::function<void(const std::vector<std::size_t>& undetected, const ComplexMatrix& q)>;

struct DetectorOptions {
  RescalePolicy rescale;
  /// Divide scaled soft estimates by their scale after detection, outside
  /// the counted arithmetic.
  bool normalize_soft = false;
  IterationObserver on_iteration;
};

/// (H^H H + alpha I)^-1 H^H x through the inverse LDM factors.
ComplexVector mmse_estimate(const MimoInstance& inst);

/// Q initialized from the division-free Hermitian factors and one division,
/// then OSIC with the Schur-complement downdate of Q.
DetectionResult detect_recursive(const MimoInstance& inst, const Constellation& c,
                                 const DetectorOptions& opt = {});

/// OSIC on the division-free factors L (D / delta) L^H of Q with wide
/// rotations; no division and no square root anywhere.
DetectionResult detect_sqrtfree(const MimoInstance& inst, const Constellation& c,
                                const DetectorOptions& opt = {});

/// Textbook OSIC recomputing Q by dense inversion every iteration.
DetectionResult detect_oracle(const MimoInstance& inst, const Constellation& c,
                              const DetectorOptions& opt = {});

/// x - h_p s_hat.
ComplexVector sic_cancel(std::span<const Complex> x, std::span<const Complex> h_p, Complex s_hat);

enum class DetectorKind { recursive, sqrtfree, oracle };
DetectorKind detector_from_name(const std::string& name);
std::string detector_name(DetectorKind kind);
DetectionResult detect(DetectorKind kind, const MimoInstance& inst, const Constellation& c,
                       const DetectorOptions& opt = {});

/// One row per stream in detection order:
/// position,stream,estimate_re,estimate_im,symbol (position and stream 1-based).
void write_detection_csv(std::ostream& os, const DetectionResult& r);

}  // namespace invldm
