#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qvlab {

// Uniform master grid on [0, horizon] with n_steps cells (n_steps + 1 nodes).
struct TimeGrid {
  double horizon = 1.0;
  std::size_t n_steps = 2;

  TimeGrid() = default;
  TimeGrid(double horizon_, std::size_t n_steps_);

  double step() const { return horizon / static_cast<double>(n_steps); }
  double time(std::size_t i) const {
    return horizon * static_cast<double>(i) / static_cast<double>(n_steps);
  }
  bool operator==(const TimeGrid& o) const {
    return horizon == o.horizon && n_steps == o.n_steps;
  }
};

struct Jump {
  std::size_t index = 0;  // grid index >= 1
  double size = 0.0;      // nonzero
};

// Realized cadlag path: continuous component sampled at the grid nodes plus an
// explicit sorted jump list (at most one jump per node). The path value is
//   X_{t_i} = cont[i] + sum of jump sizes with index <= i,
// and the left limit X_{t_i-} excludes the jump at i itself. Immutable after
// construction.
class CadlagPath {
 public:
  CadlagPath(TimeGrid grid, std::vector<double> cont, std::vector<Jump> jumps);

  // Path constant at zero.
  static CadlagPath zero(const TimeGrid& grid);

  const TimeGrid& grid() const { return grid_; }
  std::size_t n_steps() const { return grid_.n_steps; }
  const std::vector<double>& cont() const { return cont_; }
  const std::vector<Jump>& jumps() const { return jumps_; }

  double value_at(std::size_t i) const;
  double left_limit_at(std::size_t i) const;
  // Stored jump size at i (0 if no jump there).
  double jump_size_at(std::size_t i) const;

  // Full arrays of X_{t_i} resp. X_{t_i-}; left_limits()[0] repeats X_0.
  std::vector<double> values() const;
  std::vector<double> left_limits() const;

  // max over nodes of |X_{t_i}| and |X_{t_i-}|.
  double sup_norm() const;

  // Pointwise a*p + b*q; jumps at shared indices merge, exact zeros dropped.
  static CadlagPath combine(double a, const CadlagPath& p, double b,
                            const CadlagPath& q);

  // Image path under f: value f(X_{t_i}), left limit f(X_{t_i-}).
  CadlagPath map(const std::function<double(double)>& f) const;

  // Rebuild a path from its value array and jump list (cont is inferred).
  static CadlagPath from_values(const TimeGrid& grid,
                                const std::vector<double>& values,
                                std::vector<Jump> jumps);

 private:
  TimeGrid grid_;
  std::vector<double> cont_;
  std::vector<Jump> jumps_;
  // cumulative jump sum up to and including node i, cached for O(1) access
  std::vector<double> jump_prefix_;

  void build_prefix();
};

// Ensemble of paths sharing one grid, regenerated bit-exactly from (seed,
// provenance, member index).
struct PathEnsemble {
  std::uint64_t seed = 0;
  std::string provenance;
  std::vector<CadlagPath> members;
};

}  // namespace qvlab
