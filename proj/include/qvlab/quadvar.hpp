#pragma once

#include <string>
#include <vector>

#include "qvlab/partition.hpp"
#include "qvlab/path.hpp"

namespace qvlab {

// Squared-increment partition sum up to s:
//   sum_{tau_i <= s} (X_{tau_{i+1} ^ s} - X_{tau_i ^ s})^2.
double partition_qv(const CadlagPath& path, const FixedPartition& p,
                    std::size_t s_index);

double partition_covar(const CadlagPath& x, const CadlagPath& y,
                       const FixedPartition& p, std::size_t s_index);

// Partition sum evaluated at every grid index (size n_steps + 1).
std::vector<double> qv_curve(const CadlagPath& path, const FixedPartition& p);
std::vector<double> covar_curve(const CadlagPath& x, const CadlagPath& y,
                                const FixedPartition& p);

// Weak-sense QV along a refining sequence: the deepest-depth value is the
// point estimate; the jump/continuous split uses the path's exact jump list.
struct QVReport {
  struct DepthRow {
    std::string label;
    double mesh = 0.0;
    std::vector<std::size_t> s_indices;  // partition points
    std::vector<double> s_values;        // S at those points
  };
  std::vector<DepthRow> rows;
  double estimate = 0.0;            // terminal S at the deepest depth
  double jump_part = 0.0;           // sum of squared jumps (exact)
  double cont_part_estimate = 0.0;  // estimate - jump_part, tiny negatives clamped
  std::vector<double> cauchy;       // |S_k - S_{k-1}| terminal differences
};

QVReport weak_qv(const CadlagPath& path, const RefiningSequence& rs);

// Deviation of each scheme's partition sum from a reference curve (sampled on
// the full grid), sup over the scheme's partition points.
struct SchemeDeviation {
  std::string label;
  double mesh = 0.0;
  double sup_deviation = 0.0;
};
struct DeviationReport {
  std::vector<SchemeDeviation> schemes;
  double max_deviation = 0.0;
};

DeviationReport strong_qv_sweep(const CadlagPath& path,
                                const std::vector<PartitionScheme>& schemes,
                                const std::vector<double>& reference_curve);

// |S_p(X,Y)| <= sqrt(S_p(X)) * sqrt(S_p(Y)); slack = rhs - |lhs|.
struct SlackResult {
  bool holds = false;
  double slack = 0.0;
};

SlackResult kunita_watanabe_check(const CadlagPath& x, const CadlagPath& y,
                                  const FixedPartition& p);

// S_p(sum X_k) <= (sum sqrt(S_p(X_k)))^2; slack = rhs - lhs.
SlackResult triangle_check(const std::vector<CadlagPath>& paths,
                           const FixedPartition& p);

}  // namespace qvlab
