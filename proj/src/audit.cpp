#include "invldm/audit.hpp"

#include <sstream>

namespace invldm {

namespace detail {
thread_local OpCounts* active_counts = nullptr;
thread_local bool region_open = false;
}  // namespace detail

std::ostream& operator<<(std::ostream& os, const OpCounts& c) {
  return os << "cmul=" << c.cmul << " cadd=" << c.cadd << " cdiv=" << c.cdiv
            << " csqrt=" << c.csqrt << " rmul=" << c.rmul << " radd=" << c.radd;
}

std::string op_counts_csv_header() { return "cmul,cadd,cdiv,csqrt"; }

std::string to_csv(const OpCounts& c) {
  std::ostringstream os;
  os << c.cmul << ',' << c.cadd << ',' << c.cdiv << ',' << c.csqrt;
  return os.str();
}

bool assert_free_of(const OpCounts& counts, std::initializer_list<OpKind> kinds) {
  for (OpKind k : kinds) {
    if (k == OpKind::div && counts.cdiv != 0) return false;
    if (k == OpKind::sqrt && counts.csqrt != 0) return false;
  }
  return true;
}

AuditScope::AuditScope(AuditContext& ctx) : ctx_(ctx), start_(ctx.counts_) {
  if (detail::region_open) {
    throw AuditError("audited region opened while another region is open on this thread");
  }
  detail::region_open = true;
  detail::active_counts = ctx.enabled_ ? &ctx.counts_ : nullptr;
}

AuditScope::~AuditScope() {
  detail::active_counts = nullptr;
  detail::region_open = false;
}

}  // namespace invldm
