#include <cstdio>
#include <vector>

#include "ellset/propsuite.hpp"

// Acceptance gate: one line per criterion, nonzero exit if any fails.
int main() {
  const std::uint64_t seed = 20260813ULL;
  std::vector<ellset::CriterionResult> results = ellset::run_acceptance_suite(seed);
  int passed = 0;
  for (const ellset::CriterionResult& r : results) {
    std::printf("criterion %d (%s): %s [%s]\n", r.index, r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.detail.c_str());
    std::fflush(stdout);
    if (r.pass) ++passed;
  }
  std::printf("acceptance: %d/%d criteria passed\n", passed, static_cast<int>(results.size()));
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}
