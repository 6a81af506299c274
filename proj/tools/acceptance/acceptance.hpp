#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace invldm::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

inline constexpr int kCriteria = 10;

/// Criteria cheap enough for the CLI selftest.
std::vector<int> selftest_subset();

/// Runs criterion `id` (1..kCriteria). Never throws; an exception counts as
/// a failure with its message in the detail.
CriterionResult run_criterion(int id);

/// "[PASS] A<id> <title>: <detail> (<seconds> s)"
void print(std::ostream& os, const CriterionResult& r);

}  // namespace invldm::acceptance
