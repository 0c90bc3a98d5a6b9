#pragma once

#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

#include "qvlab/rng.hpp"

namespace qvlab {

// Discrete jump-size law: atoms (value, prob), values nonzero, probs sum to 1.
struct DiscreteAtoms {
  std::vector<std::pair<double, double>> atoms;
};

// Bounded-support density laws with samplers and quadrature.
struct DensityLaw {
  enum class Kind { TruncatedNormal, Uniform };
  Kind kind = Kind::TruncatedNormal;
  double sigma = 1.0;   // TruncatedNormal
  double bound = 3.0;   // TruncatedNormal: support [-bound, bound]
  double lo = -1.0;     // Uniform support
  double hi = 1.0;
};

class JumpLaw {
 public:
  JumpLaw() : law_(DiscreteAtoms{{{1.0, 1.0}}}) {}
  explicit JumpLaw(DiscreteAtoms atoms);
  explicit JumpLaw(DensityLaw density);

  static JumpLaw point_mass(double value);
  static JumpLaw symmetric_pair(double value);  // +-value with prob 1/2 each

  bool is_discrete() const { return std::holds_alternative<DiscreteAtoms>(law_); }
  const DiscreteAtoms* discrete() const { return std::get_if<DiscreteAtoms>(&law_); }
  const DensityLaw* density() const { return std::get_if<DensityLaw>(&law_); }

  double sample(RandomStream& stream) const;

  // E[g(x) 1_{|x| <= cutoff}] under the law. Atoms are summed exactly;
  // densities integrate with composite Gauss-Legendre (order-8 panels,
  // `panels` of them per support half not crossing the cutoff).
  double expect_truncated(const std::function<double(double)>& g, double cutoff,
                          std::size_t panels = 16) const;

  // Same integral by composite midpoint with `panels` panels; a deliberately
  // cruder second route used for cross-checks.
  double expect_truncated_midpoint(const std::function<double(double)>& g,
                                   double cutoff, std::size_t panels = 64) const;

 private:
  std::variant<DiscreteAtoms, DensityLaw> law_;
};

// Jump part of the process: a homogeneous Poisson component with compensator
// nu_c(ds,dx) = intensity * ds * F(dx), and fixed-time predictable jumps with
// atoms nu({s_k}, dx) = fire_prob_k * G_k(dx). The set of purely predictable
// jump times is exactly the fixed-time index set.
struct PoissonJumps {
  double intensity = 0.0;
  JumpLaw law;
};

struct FixedTimeJump {
  std::size_t grid_index = 0;
  JumpLaw law;
  double fire_prob = 1.0;  // <= 1; realizes nu({s}, R) <= 1
};

struct JumpModel {
  std::vector<PoissonJumps> poisson;  // zero or one entry
  std::vector<FixedTimeJump> fixed_times;

  void validate(std::size_t n_steps) const;

  // The set A of purely predictable jump times, as grid indices.
  std::vector<std::size_t> predictable_indices() const;
};

// Read-only view of the compensator: the Poisson time density intensity * F,
// the per-fixed-time atoms nu({s}, dx), and the predictable-time set A.
struct CompensatorView {
  double poisson_intensity = 0.0;
  const JumpLaw* poisson_law = nullptr;  // null when no Poisson part
  struct Atom {
    std::size_t grid_index = 0;
    double fire_prob = 0.0;
    const JumpLaw* law = nullptr;
  };
  std::vector<Atom> atoms;
  std::vector<std::size_t> calA;
};

CompensatorView compensator_queries(const JumpModel& model);

}  // namespace qvlab
