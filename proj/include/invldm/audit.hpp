#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

namespace invldm {

/// Tallies of arithmetic executed through the counted scalar types.
///
/// `cmul`/`cadd` count operations with at least one complex operand.
/// `rmul`/`radd` count purely real operations (both operands real), which
/// the complex-op ledger keeps separate. Every division and square root is
/// tallied in `cdiv`/`csqrt` regardless of operand type.
struct OpCounts {
  std::uint64_t cmul = 0;
  std::uint64_t cadd = 0;
  std::uint64_t cdiv = 0;
  std::uint64_t csqrt = 0;
  std::uint64_t rmul = 0;
  std::uint64_t radd = 0;

  OpCounts& operator+=(const OpCounts& o) {
    cmul += o.cmul;
    cadd += o.cadd;
    cdiv += o.cdiv;
    csqrt += o.csqrt;
    rmul += o.rmul;
    radd += o.radd;
    return *this;
  }
  friend OpCounts operator+(OpCounts a, const OpCounts& b) { return a += b; }
  // Difference of two snapshots of the same monotone counter.
  friend OpCounts operator-(const OpCounts& a, const OpCounts& b) {
    return {a.cmul - b.cmul, a.cadd - b.cadd, a.cdiv - b.cdiv,
            a.csqrt - b.csqrt, a.rmul - b.rmul, a.radd - b.radd};
  }
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

std::ostream& operator<<(std::ostream& os, const OpCounts& c);

/// CSV header and row for the four complex-op columns: cmul,cadd,cdiv,csqrt.
std::string op_counts_csv_header();
std::string to_csv(const OpCounts& c);

enum class OpKind { div, sqrt };

/// True iff every named kind has a zero count.
bool assert_free_of(const OpCounts& counts, std::initializer_list<OpKind> kinds);

class AuditError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Running tally owned by one execution stream.
class AuditContext {
 public:
  explicit AuditContext(bool enabled = true) : enabled_(enabled) {}

  bool enabled() const { return enabled_; }
  const OpCounts& counts() const { return counts_; }
  void reset() { counts_ = {}; }

 private:
  friend class AuditScope;
  OpCounts counts_;
  bool enabled_;
};

namespace detail {
// Counter of the open audited region on this thread (null: not counting).
extern thread_local OpCounts* active_counts;
extern thread_local bool region_open;
}  // namespace detail

/// RAII audited region. Opening a second region on the same thread while one
/// is open throws AuditError.
class AuditScope {
 public:
  explicit AuditScope(AuditContext& ctx);
  ~AuditScope();
  AuditScope(const AuditScope&) = delete;
  AuditScope& operator=(const AuditScope&) = delete;

  /// Counts accumulated since this scope opened.
  OpCounts counts() const { return ctx_.counts_ - start_; }

 private:
  AuditContext& ctx_;
  OpCounts start_;
};

/// Temporarily stops tallying on this thread (diagnostics that must not
/// pollute the ledger).
class CountingPause {
 public:
  CountingPause() : saved_(detail::active_counts) { detail::active_counts = nullptr; }
  ~CountingPause() { detail::active_counts = saved_; }
  CountingPause(const CountingPause&) = delete;
  CountingPause& operator=(const CountingPause&) = delete;

 private:
  OpCounts* saved_;
};

/// Snapshot of the active region's tallies, if one is open and counting.
inline std::optional<OpCounts> current_counts() {
  if (detail::active_counts) return *detail::active_counts;
  return std::nullopt;
}

template <class R>
struct Audited {
  R result;
  OpCounts counts;
};

/// Runs `fn` inside an audited region on `ctx`; returns its result and the
/// exact tallies of the arithmetic it performed.
template <class F>
auto audited_region(AuditContext& ctx, F&& fn) {
  using R = std::invoke_result_t<F>;
  AuditScope scope(ctx);
  if constexpr (std::is_void_v<R>) {
    std::forward<F>(fn)();
    return Audited<std::monostate>{{}, scope.counts()};
  } else {
    R result = std::forward<F>(fn)();
    return Audited<R>{std::move(result), scope.counts()};
  }
}

}  // namespace invldm
