#include "invldm/vblast.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "invldm/errors.hpp"
#include "invldm/inv_ldm.hpp"
#include "invldm/matrix_io.hpp"
#include "invldm/wide_givens.hpp"

namespace invldm {

Constellation::Constellation(std::string name, std::vector<complex_t> points)
    : name_(std::move(name)), points_(std::move(points)) {
  if (points_.empty()) throw InputError("constellation needs at least one point");
  real_t total = 0;
  for (const complex_t& p : points_) {
    energy_.push_back(std::norm(p));
    total += energy_.back();
  }
  if (std::abs(total / static_cast<real_t>(points_.size()) - 1) > 1e-12) {
    throw InputError("constellation '" + name_ + "' does not have unit mean energy");
  }
}

Constellation Constellation::qpsk() {
  const real_t a = 1 / std::sqrt(2.0);
  return {"qpsk", {{a, a}, {-a, a}, {-a, -a}, {a, -a}}};
}

Constellation Constellation::bpsk() { return {"bpsk", {{1, 0}, {-1, 0}}}; }

Constellation Constellation::qam16() {
  const real_t s = 1 / std::sqrt(10.0);
  std::vector<complex_t> pts;
  for (int re : {-3, -1, 1, 3})
    for (int im : {-3, -1, 1, 3}) pts.emplace_back(re * s, im * s);
  return {"qam16", std::move(pts)};
}

Constellation Constellation::by_name(const std::string& name) {
  if (name == "qpsk") return qpsk();
  if (name == "bpsk") return bpsk();
  if (name == "qam16") return qam16();
  throw InputError("unknown constellation '" + name + "'");
}

std::size_t Constellation::slice(Complex z, Real scale) const {
  std::size_t best = 0;
  Real best_metric;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const Real cross = Real(points_[i].real()) * z.re() + Real(points_[i].imag()) * z.im();
    const Real metric = scale * Real(energy_[i]) - scale_pow2(cross, 1);
    if (i == 0 || metric < best_metric) {
      best = i;
      best_metric = metric;
    }
  }
  return best;
}

void MimoInstance::validate() const {
  if (H.rows() < H.cols()) {
    throw DimensionError("channel has " + std::to_string(H.rows()) + " receive antennas for " +
                         std::to_string(H.cols()) + " streams; need N >= K");
  }
  if (x.size() != H.rows()) {
    throw DimensionError("received vector has " + std::to_string(x.size()) +
                         " entries, channel has " + std::to_string(H.rows()) + " rows");
  }
  if (!(alpha >= 0)) throw InputError("alpha must be non-negative");
}

ComplexVector sic_cancel(std::span<const Complex> x, std::span<const Complex> h_p, Complex s_hat) {
  if (x.size() != h_p.size()) throw DimensionError("sic_cancel: length mismatch");
  ComplexVector out(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) out[n] = x[n] - h_p[n] * s_hat;
  return out;
}

ComplexVector mmse_estimate(const MimoInstance& inst) {
  inst.validate();
  const ComplexMatrix q = assemble_inverse(inv_ldm_factorize(gram_regularized(inst.H, inst.alpha)));
  return multiply(q, multiply(inst.H.adjoint(), inst.x));
}

namespace {

OpCounts snapshot() { return current_counts().value_or(OpCounts{}); }

// h_s^H x for each listed stream s.
ComplexVector matched_filter(const ComplexMatrix& H, const std::vector<std::size_t>& streams,
                             const ComplexVector& x) {
  ComplexVector y(streams.size());
  for (std::size_t j = 0; j < streams.size(); ++j) {
    Complex acc = conj(H(0, streams[j])) * x[0];
    for (std::size_t n = 1; n < H.rows(); ++n) acc += conj(H(n, streams[j])) * x[n];
    y[j] = acc;
  }
  return y;
}

// Index of the smallest value (first on ties) and the gap to the runner-up.
std::pair<std::size_t, real_t> argmin_with_gap(const std::vector<real_t>& v) {
  std::size_t p = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[p]) p = i;
  real_t gap = std::numeric_limits<real_t>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (i != p) gap = std::min(gap, v[i] - v[p]);
  return {p, gap};
}

class OsicState {
 public:
  OsicState(const MimoInstance& inst, const Constellation& c)
      : inst_(inst), c_(c), x_(inst.x), streams_(inst.streams()) {
    const std::size_t K = inst.streams();
    std::iota(streams_.begin(), streams_.end(), std::size_t{0});
    res_.symbol_indices.assign(K, 0);
    res_.symbols.assign(K, 0);
    res_.soft_estimates.assign(K, 0);
    res_.soft_scale.assign(K, 1);
  }

  const std::vector<std::size_t>& streams() const { return streams_; }
  ComplexVector matched() const { return matched_filter(inst_.H, streams_, x_); }
  ComplexVector matched(const std::vector<std::size_t>& streams) const {
    return matched_filter(inst_.H, streams, x_);
  }
  DetectionResult& result() { return res_; }

  void observe(const DetectorOptions& opt, const ComplexMatrix& q) const {
    if (!opt.on_iteration) return;
    CountingPause pause;
    opt.on_iteration(streams_, q);
  }

  void note_gap(real_t gap) { res_.min_diagonal_gap = std::min(res_.min_diagonal_gap, gap); }

  // Slices the estimate (scaled by `scale`) of the stream at position p,
  // cancels it from x and drops it from the undetected list.
  void decide(std::size_t p, Complex estimate, Real scale, const OpCounts& iteration_start) {
    const std::size_t s = streams_[p];
    const std::size_t idx = c_.slice(estimate, scale);
    const Complex symbol = c_.points()[idx];
    x_ = sic_cancel(x_, inst_.H.col(s), symbol);
    streams_.erase(streams_.begin() + static_cast<std::ptrdiff_t>(p));

    res_.order.push_back(s);
    res_.symbol_indices[s] = idx;
    res_.symbols[s] = symbol.value();
    res_.soft_estimates[s] = estimate.value();
    res_.soft_scale[s] = scale.value();
    res_.iterations.push_back({s, scale.value(), snapshot() - iteration_start});
  }

  void finish(const DetectorOptions& opt) {
    if (!opt.normalize_soft) return;
    CountingPause pause;
    for (std::size_t s = 0; s < res_.soft_estimates.size(); ++s) {
      res_.soft_estimates[s] /= res_.soft_scale[s];
      res_.soft_scale[s] = 1;
    }
  }

 private:
  const MimoInstance& inst_;
  const Constellation& c_;
  ComplexVector x_;
  std::vector<std::size_t> streams_;
  DetectionResult res_;
};

// Q over the streams other than position p: Q_a - q q^H / q_pp.
ComplexMatrix downdate(const ComplexMatrix& q, std::size_t p) {
  const std::size_t n = q.rows() - 1;
  const Real corner = real(q(p, p));
  if (!(corner.value() > 0)) throw SingularError("detect_recursive: non-positive corner of Q");
  const Real r = Real(1.0) / corner;

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i <= n; ++i)
    if (i != p) keep.push_back(i);
  ComplexVector g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = q(keep[i], p) * r;

  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    out(i, i) = Complex(real(q(keep[i], keep[i])) - r * norm(q(keep[i], p)));
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex v = q(keep[i], keep[j]) - g[i] * conj(q(keep[j], p));
      out(i, j) = v;
      out(j, i) = conj(v);
    }
  }
  return ComplexMatrix::hermitian(out);
}

}  // namespace

DetectionResult detect_recursive(const MimoInstance& inst, const Constellation& c,
                                 const DetectorOptions& opt) {
  inst.validate();
  OsicState st(inst, c);
  DetectionResult& res = st.result();

  const OpCounts t0 = snapshot();
  const ComplexMatrix R = gram_regularized(inst.H, inst.alpha);
  const OpCounts t1 = snapshot();
  RescalePolicy policy = opt.rescale;
  ComplexMatrix q = assemble_q(divfree_ldl_hermitian(R, policy));
  const OpCounts t2 = snapshot();

  while (!st.streams().empty()) {
    const OpCounts it = snapshot();
    st.observe(opt, q);
    std::vector<real_t> diag(q.rows());
    for (std::size_t i = 0; i < q.rows(); ++i) diag[i] = q(i, i).re();
    const auto [p, gap] = argmin_with_gap(diag);
    st.note_gap(gap);

    const ComplexVector y = st.matched();
    Complex est = q(p, 0) * y[0];
    for (std::size_t j = 1; j < y.size(); ++j) est += q(p, j) * y[j];
    if (q.rows() > 1) q = downdate(q, p);
    st.decide(p, est, Real(1.0), it);
  }
  res.gram_counts = t1 - t0;
  res.init_counts = t2 - t1;
  res.osic_counts = snapshot() - t2;
  st.finish(opt);
  return std::move(res);
}

DetectionResult detect_sqrtfree(const MimoInstance& inst, const Constellation& c,
                                const DetectorOptions& opt) {
  inst.validate();
  OsicState st(inst, c);
  DetectionResult& res = st.result();

  const OpCounts t0 = snapshot();
  const ComplexMatrix R = gram_regularized(inst.H, inst.alpha);
  const OpCounts t1 = snapshot();
  RescalePolicy policy = opt.rescale;
  const DivFreeFactors f = divfree_ldl_hermitian(R, policy);
  WeightedTriangular w{f.lt, {}, real(f.delta)};
  for (const Complex& d : f.dt) w.d.push_back(real(d));
  const OpCounts t2 = snapshot();

  while (!st.streams().empty()) {
    const OpCounts it = snapshot();
    const std::size_t k = w.order();
    if (opt.on_iteration) st.observe(opt, w.represented());

    // Diagonal of Q times delta: n_i = sum_{m >= i} d_m |L_im|^2.
    std::vector<Real> num(k);
    for (std::size_t i = 0; i < k; ++i) {
      Real acc = w.d[i] * norm(w.L(i, i));
      for (std::size_t m = i + 1; m < k; ++m) acc += w.d[m] * norm(w.L(i, m));
      num[i] = acc;
    }
    std::size_t p = 0;
    for (std::size_t i = 1; i < k; ++i)
      if (num[i] < num[p]) p = i;
    {
      CountingPause pause;
      std::vector<real_t> diag(k);
      for (std::size_t i = 0; i < k; ++i) diag[i] = num[i].value() / w.delta.value();
      st.note_gap(argmin_with_gap(diag).second);
    }

    // Row p to the bottom, the rows below it move up; streams follow.
    WeightedTriangular shifted{ComplexMatrix(k, k), w.d, w.delta};
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t src = i < p ? i : (i + 1 < k ? i + 1 : p);
      for (std::size_t j = 0; j < k; ++j) shifted.L(i, j) = w.L(src, j);
    }
    std::vector<std::size_t> order = st.streams();
    std::rotate(order.begin() + static_cast<std::ptrdiff_t>(p),
                order.begin() + static_cast<std::ptrdiff_t>(p) + 1, order.end());

    BlockTriangularResult bt = block_triangularize(std::move(shifted), policy);
    const std::size_t last = k - 1;

    // delta Q row of the detected stream = lambda d_last [mu; lambda]^H.
    const ComplexVector y = st.matched(order);
    Complex acc = conj(bt.w.L(0, last)) * y[0];
    for (std::size_t j = 1; j < k; ++j) acc += conj(bt.w.L(j, last)) * y[j];
    const Complex est = (bt.lambda * bt.w.d[last]) * acc;

    w.L = last > 0 ? bt.w.L.block(0, 0, last, last) : ComplexMatrix(1, 1);
    w.d.assign(bt.w.d.begin(), bt.w.d.begin() + static_cast<std::ptrdiff_t>(last));
    w.delta = bt.w.delta;
    st.decide(p, est, bt.w.delta, it);
  }
  res.gram_counts = t1 - t0;
  res.init_counts = t2 - t1;
  res.osic_counts = snapshot() - t2;
  st.finish(opt);
  return std::move(res);
}

DetectionResult detect_oracle(const MimoInstance& inst, const Constellation& c,
                              const DetectorOptions& opt) {
  inst.validate();
  OsicState st(inst, c);
  DetectionResult& res = st.result();
  const OpCounts t0 = snapshot();

  while (!st.streams().empty()) {
    const OpCounts it = snapshot();
    const std::vector<std::size_t>& streams = st.streams();
    ComplexMatrix h(inst.antennas(), streams.size());
    for (std::size_t n = 0; n < inst.antennas(); ++n)
      for (std::size_t j = 0; j < streams.size(); ++j) h(n, j) = inst.H(n, streams[j]);
    const ComplexMatrix q = dense_inverse(gram_regularized(h, inst.alpha));
    st.observe(opt, q);

    std::vector<real_t> diag(q.rows());
    for (std::size_t i = 0; i < q.rows(); ++i) diag[i] = q(i, i).re();
    const auto [p, gap] = argmin_with_gap(diag);
    st.note_gap(gap);

    const ComplexVector y = st.matched();
    Complex est = q(p, 0) * y[0];
    for (std::size_t j = 1; j < y.size(); ++j) est += q(p, j) * y[j];
    st.decide(p, est, Real(1.0), it);
  }
  res.osic_counts = snapshot() - t0;
  st.finish(opt);
  return std::move(res);
}

DetectorKind detector_from_name(const std::string& name) {
  if (name == "recursive") return DetectorKind::recursive;
  if (name == "sqrtfree") return DetectorKind::sqrtfree;
  if (name == "oracle") return DetectorKind::oracle;
  throw InputError("unknown detector '" + name + "'");
}

std::string detector_name(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::recursive: return "recursive";
    case DetectorKind::sqrtfree: return "sqrtfree";
    case DetectorKind::oracle: return "oracle";
  }
  return "?";
}

DetectionResult detect(DetectorKind kind, const MimoInstance& inst, const Constellation& c,
                       const DetectorOptions& opt) {
  switch (kind) {
    case DetectorKind::recursive: return detect_recursive(inst, c, opt);
    case DetectorKind::sqrtfree: return detect_sqrtfree(inst, c, opt);
    case DetectorKind::oracle: return detect_oracle(inst, c, opt);
  }
  throw InputError("unknown detector");
}

void write_detection_csv(std::ostream& os, const DetectionResult& r) {
  os << "position,stream,estimate_re,estimate_im,symbol\n";
  for (std::size_t pos = 0; pos < r.order.size(); ++pos) {
    const std::size_t s = r.order[pos];
    const complex_t e = r.soft_estimates[s] / r.soft_scale[s];
    os << pos + 1 << ',' << s + 1 << ',' << format_real(e.real()) << ',' << format_real(e.imag())
       << ',' << r.symbol_indices[s] << '\n';
  }
}

}  // namespace invldm
