#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qvlab {

// One verification criterion of the `check` suite. `files` holds CSV
// artifacts (name, content) the CLI writes next to the run manifest.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  std::vector<std::pair<std::string, std::string>> files;
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool all_pass = false;
};

// Runs the full verification suite with tolerances pinned in the
// implementation. `jobs` = worker threads (0 = hardware concurrency).
AcceptanceReport run_acceptance(int jobs = 0);

}  // namespace qvlab
