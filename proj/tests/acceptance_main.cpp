// Verification-suite runner: executes every acceptance criterion with its
// pinned tolerances and prints one PASS/FAIL line per criterion.
#include <cstdio>

#include "qvlab/acceptance.hpp"

int main() {
  const qvlab::AcceptanceReport report = qvlab::run_acceptance(0);
  for (const auto& c : report.criteria)
    std::printf("%s [%d] %s: %s\n", c.pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), c.detail.c_str());
  std::printf("%s\n", report.all_pass ? "ALL PASS" : "FAILURES PRESENT");
  return report.all_pass ? 0 : 1;
}
