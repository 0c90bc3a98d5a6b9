#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qvlab/decomposition.hpp"
#include "qvlab/generators.hpp"
#include "qvlab/partition.hpp"
#include "qvlab/path.hpp"
#include "qvlab/transform.hpp"

namespace qvlab {

struct ToleranceSet {
  double stability_bound_factor = 1.25;
  double stability_slope = 2.0;
  double stability_slope_window = 0.4;
  double gamma_qv_fraction = 0.05;
  double jump_cancellation_rel = 1e-9;
  double rewrite_gap_discrete = 1e-9;
  double rewrite_gap_density = 1e-6;
  double follmer_residual_rel = 5e-3;
  double lowther_gap_rel = 0.03;
};

struct ExperimentConfig {
  TimeGrid grid{1.0, 1 << 18};
  ProcessSpec process;
  std::string transform = "square";
  PerturbationFamily family;
  int k_min = 6;
  int k_max = 14;
  std::vector<PartitionScheme> schemes;
  std::size_t seeds = 50;
  std::uint64_t base_seed = 12345;
  double threshold_a = 1.0;
  ToleranceSet tolerances;
  std::string output_dir = "out";
  int jobs = 0;
  DecompositionOptions decomposition;

  void validate() const;
};

// Least-squares slope of log(value) vs log(x); values floored at 1e-15.
double convergence_slope(const std::vector<double>& values,
                         const std::vector<double>& xs);

struct StabilityRow {
  int n = 0;
  double eps = 0.0;
  double median_qv_diff = 0.0;     // median [f(X^n) - f(X)]_t estimate
  double median_x_qv_diff = 0.0;   // median [X^n - X]_t estimate
  double median_bound = 0.0;       // median 2 M^2 [X^n - X]_t
  double median_ratio = 0.0;       // median of per-seed estimate / bound
  double p99_sup_xn = 0.0;         // 99th pct of (X^n)*_t across seeds
  double median_sup_diff = 0.0;    // median (X^n - X)*_t
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  std::vector<std::vector<double>> per_depth_medians;  // row-per-n, col-per-depth
  double slope = 0.0;
  bool monotone = false;
  bool bounds_ok = false;
  bool slope_ok = false;
  bool pass = false;
  std::string hypothesis_note;  // e.g. JumpScale runs are hypothesis-unverified

  std::string to_csv() const;
};

StabilityReport run_stability(const ExperimentConfig& config);

struct DecompositionVerdict {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
};

struct DecompositionSuiteReport {
  std::vector<DecompositionVerdict> verdicts;
  bool pass = false;

  std::string to_csv() const;
};

DecompositionSuiteReport run_decomposition_suite(const ExperimentConfig& config);

// Run-manifest contents: canonical config dump, its hash, seed and version.
std::string run_manifest(const std::string& canonical_config,
                         std::uint64_t seed);

double median(std::vector<double> values);
double percentile(std::vector<double> values, double p);

}  // namespace qvlab
