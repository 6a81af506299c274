// Runs every acceptance criterion and prints one PASS/FAIL line for each.

#include <iostream>

#include "acceptance.hpp"

int main() {
  int failed = 0;
  for (int id = 1; id <= invldm::acceptance::kCriteria; ++id) {
    const auto r = invldm::acceptance::run_criterion(id);
    invldm::acceptance::print(std::cout, r);
    std::cout.flush();
    failed += !r.passed;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << invldm::acceptance::kCriteria - failed << "/"
            << invldm::acceptance::kCriteria << '\n';
  return failed ? 1 : 0;
}
