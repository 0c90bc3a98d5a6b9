#include "qvlab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qvlab/rng.hpp"

namespace qvlab {

void FixedPartition::validate(const TimeGrid& grid) const {
  if (indices.size() < 2 || indices.front() != 0 || indices.back() != grid.n_steps)
    throw std::invalid_argument("partition must start at 0 and end at n_steps");
  for (std::size_t i = 1; i < indices.size(); ++i)
    if (indices[i] <= indices[i - 1])
      throw std::invalid_argument("partition indices must be strictly increasing");
}

RefiningSequence dyadic_refining(const TimeGrid& grid, int k_min, int k_max) {
  if (k_min < 0 || k_max < k_min)
    throw std::invalid_argument("dyadic_refining: need 0 <= k_min <= k_max");
  const std::size_t deepest = std::size_t{1} << k_max;
  if (deepest > grid.n_steps || grid.n_steps % deepest != 0)
    throw std::invalid_argument(
        "dyadic_refining: depth exceeds grid resolution (n_steps must be a "
        "multiple of 2^k_max)");
  RefiningSequence rs;
  for (int k = k_min; k <= k_max; ++k) {
    const std::size_t stride = grid.n_steps / (std::size_t{1} << k);
    FixedPartition p;
    for (std::size_t i = 0; i <= grid.n_steps; i += stride) p.indices.push_back(i);
    rs.depths.push_back(std::move(p));
    rs.depth_labels.push_back(k);
  }
  return rs;
}

StoppingPartition hitting_time_partition(const CadlagPath& path, double epsilon,
                                         double cap) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(cap > 0.0)) throw std::invalid_argument("cap must be > 0");
  const TimeGrid& grid = path.grid();
  const std::vector<double> vals = path.values();
  const double dt = grid.step();
  // cap expressed in whole grid cells, snapping up to the next index
  const std::size_t cap_cells = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(cap / dt - 1e-12)));

  StoppingPartition sp;
  sp.epsilon = epsilon;
  sp.cap = cap;
  sp.partition.indices.push_back(0);
  std::size_t tau = 0;
  while (tau < grid.n_steps) {
    const double base = vals[tau];
    std::size_t limit = std::min(grid.n_steps, tau + cap_cells);
    std::size_t next = limit;
    for (std::size_t i = tau + 1; i <= limit; ++i) {
      if (std::abs(vals[i] - base) >= epsilon) {
        next = i;
        break;
      }
    }
    sp.partition.indices.push_back(next);
    tau = next;
  }
  return sp;
}

double mesh(const FixedPartition& p, const TimeGrid& grid) {
  p.validate(grid);
  std::size_t widest = 0;
  for (std::size_t i = 1; i < p.indices.size(); ++i)
    widest = std::max(widest, p.indices[i] - p.indices[i - 1]);
  return grid.step() * static_cast<double>(widest);
}

std::string PartitionScheme::label() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Dyadic:
      os << "dyadic_k" << depth;
      break;
    case Kind::ShiftedDyadic:
      os << "shifted_dyadic_k" << depth;
      break;
    case Kind::HittingTime:
      os << "hitting_eps" << epsilon << "_cap" << cap;
      break;
    case Kind::RandomMesh:
      os << "random_gap" << mean_gap << "_s" << seed;
      break;
  }
  return os.str();
}

FixedPartition build_partition(const PartitionScheme& scheme,
                               const CadlagPath& path) {
  const TimeGrid& grid = path.grid();
  switch (scheme.kind) {
    case PartitionScheme::Kind::Dyadic: {
      RefiningSequence rs = dyadic_refining(grid, scheme.depth, scheme.depth);
      return rs.depths.front();
    }
    case PartitionScheme::Kind::ShiftedDyadic: {
      const std::size_t n = std::size_t{1} << scheme.depth;
      if (n > grid.n_steps || grid.n_steps % n != 0)
        throw std::invalid_argument("shifted dyadic depth exceeds grid resolution");
      const std::size_t stride = grid.n_steps / n;
      const std::size_t shift = stride / 2;
      FixedPartition p;
      p.indices.push_back(0);
      for (std::size_t i = shift; i < grid.n_steps; i += stride)
        if (i > 0) p.indices.push_back(i);
      p.indices.push_back(grid.n_steps);
      return p;
    }
    case PartitionScheme::Kind::HittingTime:
      return hitting_time_partition(path, scheme.epsilon, scheme.cap).partition;
    case PartitionScheme::Kind::RandomMesh: {
      RandomStream stream =
          RandomStream::derive(scheme.seed, "partition-random-mesh");
      const double p_keep =
          std::min(1.0, grid.step() / std::max(scheme.mean_gap, grid.step()));
      FixedPartition p;
      p.indices.push_back(0);
      for (std::size_t i = 1; i < grid.n_steps; ++i)
        if (stream.next_unit() < p_keep) p.indices.push_back(i);
      p.indices.push_back(grid.n_steps);
      return p;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace qvlab
