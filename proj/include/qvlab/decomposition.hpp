#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qvlab/generators.hpp"
#include "qvlab/partition.hpp"
#include "qvlab/path.hpp"
#include "qvlab/quadvar.hpp"
#include "qvlab/transform.hpp"

namespace qvlab {

struct DecompositionOptions {
  int k_min = 6;
  int k_max = 14;
  // Continuous-QV estimate used in Stieltjes terms: partition sum minus the
  // exact jump sum (default), or the generator-exact rate * t.
  enum class ContQvMode { PartitionMinusJumps, GeneratorExact };
  ContQvMode cont_qv_mode = ContQvMode::PartitionMinusJumps;
  double generator_cont_qv_rate = 1.0;  // sigma^2 for GeneratorExact
  std::size_t quad_panels = 32;         // density-law quadrature panels
};

// f(X_t) = f(X_0) + sum(jump compensation) + int f'(X_-) dX
//        + 1/2 int f''(X_-) d[X]^c, evaluated per depth; the residual is the
// sup over the grid of the defect at the deepest depth.
struct FollmerReport {
  CadlagPath jump_compensation;
  CadlagPath integral;                    // deepest depth
  double residual_sup = 0.0;              // deepest depth
  std::vector<double> residual_by_depth;  // one entry per depth
};

FollmerReport follmer_decompose(const TransformSpec& f, const CadlagPath& x,
                                const RefiningSequence& rs,
                                const DecompositionOptions& opt = {});

// [f(X)]_t vs int f'(X_-)^2 d[X]^c + sum (Delta f(X))^2.
struct LowtherReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap_relative = 0.0;
  bool assumption_warning = false;  // occupation weight near disc(f') too large
  double occupation_weight = 0.0;
};

LowtherReport lowther_qv_identity(const TransformSpec& f, const CadlagPath& x,
                                  const RefiningSequence& rs,
                                  const DecompositionOptions& opt = {});

// Semimartingale/zero-QV split of f(X) at jump threshold a:
// Y^a = f(X_0) + big-jump compensation + int f'(X_-) dZ
//     + compensated small-jump sum + predictable small-jump sum,
// Gamma^a = f(X) - Y^a.
struct DecompositionReport {
  CadlagPath big_jump_sum;
  CadlagPath dz_integral;
  CadlagPath small_jump_compensated;   // realized non-predictable - compensator
  CadlagPath predictable_small_sum;
  CadlagPath ya;
  CadlagPath gamma;
  double residual_sup = 0.0;           // sup |f(X) - (Y^a + Gamma^a)|, audit
  double jump_cancellation = 0.0;      // max |Delta Gamma^a| at jump indices
  QVReport gamma_qv;
  QVReport fx_qv;
};

DecompositionReport ya_decompose(const TransformSpec& f, const DirichletPath& x,
                                 double a, const DecompositionOptions& opt = {});

// sum over fixed times of fire_prob * E[|x| 1_{|x| <= a}].
double predictable_summability(const JumpModel& model, double a,
                               std::size_t quad_panels = 16);

// Compares the (mu - nu) routing of the small-jump compensation against the
// (mu~ - nu_c) + predictable-atom routing; the predictable atoms are
// integrated with two different quadrature rules so the gap measures
// quadrature error (exactly zero for discrete laws, up to round-off).
struct RewriteConsistencyReport {
  double sup_gap = 0.0;
};

RewriteConsistencyReport rewrite_consistency(const TransformSpec& f,
                                             const DirichletPath& x, double a,
                                             const DecompositionOptions& opt = {});

}  // namespace qvlab
