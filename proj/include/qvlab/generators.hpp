#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qvlab/jumps.hpp"
#include "qvlab/path.hpp"
#include "qvlab/rng.hpp"

namespace qvlab {

// Scaled Brownian path on the grid; increments N(0, sigma^2 dt).
CadlagPath gen_bm(const TimeGrid& grid, double sigma, RandomStream stream);

// Exact-covariance fractional Brownian path via Davies-Harte circulant
// embedding (requires n_steps to be a power of two); falls back to direct
// Cholesky factorization of the fGn covariance for small non-dyadic grids.
// Requires 0.5 < hurst < 1 (the zero-QV regime).
CadlagPath gen_fbm(const TimeGrid& grid, double hurst, double scale,
                   RandomStream stream);

// Realized jumps split by origin. `merged` combines both lists; a Poisson
// arrival colliding with a fixed-time index is folded into the fixed-time
// jump (the grid cell is the time resolution).
struct RealizedJumps {
  std::vector<Jump> poisson;
  std::vector<Jump> predictable;
  std::vector<Jump> merged;
};

RealizedJumps gen_jumps(const TimeGrid& grid, const JumpModel& model,
                        RandomStream poisson_stream, RandomStream fixed_stream);

// Piecewise-linear deterministic drift through (time, value) knots; constant
// extension outside the knot range; empty means zero drift.
struct DriftSpec {
  std::vector<std::pair<double, double>> knots;
  double value(double t) const;
};

struct ZeroQvSpec {
  enum class Kind { None, Fbm, DeterministicHoelder };
  Kind kind = Kind::None;
  double hurst = 0.75;  // Fbm: in (0.5, 1)
  double scale = 1.0;
  // DeterministicHoelder: scale * |sin(2 pi t / horizon)|^{hurst-ish} style
  // fixed path; used for seed-free scenarios.
};

struct ProcessSpec {
  double bm_sigma = 1.0;
  DriftSpec drift;
  JumpModel jumps;
  ZeroQvSpec zero_qv;
  bool independent_streams = true;

  void validate(const TimeGrid& grid) const;
};

// Dirichlet process X = Z + C with all components retained:
// Z = M + V + jump part (semimartingale), C the zero-QV continuous part.
struct DirichletPath {
  CadlagPath x, z, c, m, v;
  RealizedJumps jumps;
  JumpModel model;
  ProcessSpec spec;
  TimeGrid grid;
  std::uint64_t seed = 0;
};

DirichletPath gen_dirichlet(const ProcessSpec& spec, const TimeGrid& grid,
                            std::uint64_t seed, std::uint64_t member = 0);

// Perturbation family X^n -> X.
struct PerturbationFamily {
  enum class Kind { AddBM, AddZeroQV, JumpScale };
  Kind kind = Kind::AddBM;
  double coefficient = 1.0;  // eps_n = coefficient * 2^{-n/2}
  double hurst = 0.75;       // AddZeroQV
  int n_min = 2;
  int n_max = 10;

  double eps(int n) const;
};

struct PerturbedFamily {
  std::vector<int> ns;
  std::vector<double> eps;
  std::vector<CadlagPath> members;
};

PerturbedFamily gen_perturbed_family(const DirichletPath& base,
                                     const PerturbationFamily& fam,
                                     std::uint64_t seed);

}  // namespace qvlab
