#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qvlab/path.hpp"

namespace qvlab {

// Partition of [0, horizon] given by strictly increasing grid indices,
// starting at 0 and ending at n_steps.
struct FixedPartition {
  std::vector<std::size_t> indices;

  void validate(const TimeGrid& grid) const;
};

// Sequence of fixed partitions with nonincreasing mesh (dyadic by default).
struct RefiningSequence {
  std::vector<FixedPartition> depths;
  std::vector<int> depth_labels;  // dyadic depth k per entry
};

// Adapted stopping-time partition: level-crossing times of the path, capped.
struct StoppingPartition {
  FixedPartition partition;
  double epsilon = 0.0;
  double cap = 0.0;
};

// Dyadic partitions of depth k_min..k_max; depth k keeps every n_steps/2^k-th
// index, so n_steps must be divisible by 2^k_max.
RefiningSequence dyadic_refining(const TimeGrid& grid, int k_min, int k_max);

// tau_0 = 0; tau_{m+1} = first grid time after tau_m at which
// |X_s - X_{tau_m}| >= epsilon, capped at tau_m + cap and at the horizon.
// Inspection is right-continuous: times snap to the next grid index.
StoppingPartition hitting_time_partition(const CadlagPath& path, double epsilon,
                                         double cap);

double mesh(const FixedPartition& p, const TimeGrid& grid);

// Descriptor of one partition scheme for strong-sense sweeps.
struct PartitionScheme {
  enum class Kind { Dyadic, ShiftedDyadic, HittingTime, RandomMesh };
  Kind kind = Kind::Dyadic;
  int depth = 10;            // Dyadic / ShiftedDyadic
  double epsilon = 0.05;     // HittingTime
  double cap = 0.01;         // HittingTime
  double mean_gap = 1e-3;    // RandomMesh: expected time gap
  std::uint64_t seed = 1;    // RandomMesh

  std::string label() const;
};

// Materializes a scheme on a concrete path (hitting-time schemes are
// path-dependent; the others only use the grid).
FixedPartition build_partition(const PartitionScheme& scheme,
                               const CadlagPath& path);

}  // namespace qvlab
