#pragma once

#include <functional>
#include <vector>

#include "qvlab/partition.hpp"
#include "qvlab/path.hpp"
#include "qvlab/quadvar.hpp"
#include "qvlab/transform.hpp"

namespace qvlab {

// Cumulative left-point Riemann-Stieltjes sum
//   I_s = sum Y_{tau_{i-1}} (X_{tau_i ^ s} - X_{tau_{i-1} ^ s}),
// returned as a path on the full grid. I jumps exactly where X jumps, with
// size Y_{tau_prev} * dX.
CadlagPath riemann_integral(const CadlagPath& integrand_left,
                            const CadlagPath& integrator,
                            const FixedPartition& p);

// Cumulative left sums on the master grid with exact jump handling: the
// continuous part of each cell increment is weighted by the integrand at the
// left node, the jump part by the integrand evaluated at the left limit of
// the jump time. `at_left_limit(i)` supplies that value.
CadlagPath grid_integral_left(
    const std::function<double(std::size_t)>& at_left_node,
    const std::function<double(std::size_t)>& at_left_limit,
    const CadlagPath& integrator);

// Integration-by-parts residual at the given partition (an exact finite-sum
// identity): sup over partition points of
//   |int Y- dX + int X- dY + [X,Y]^p - (X Y - X_0 Y_0)|.
double ibp_residual(const CadlagPath& y, const CadlagPath& x,
                    const FixedPartition& p);

// Left-point Stieltjes sum of the integrand against a nondecreasing sampled
// function (size n_steps + 1). Decreases beyond `tolerance` throw; smaller
// wiggles are clamped.
double stieltjes_against_increasing(const CadlagPath& integrand,
                                    const std::vector<double>& increasing,
                                    const FixedPartition& p,
                                    double tolerance = 1e-9);

// Signed left-point Stieltjes curve against an arbitrary sampled function;
// internal building block for decomposition terms (no monotonicity demand).
std::vector<double> stieltjes_curve_signed(
    const std::vector<double>& integrand_left,
    const std::vector<double>& against, const FixedPartition& p);

// Cached numeric antiderivative G(x) = g(0) + int_0^x g(u) du on [lo, hi],
// composite Gauss-Legendre with panel boundaries at g's discontinuities.
class Antiderivative {
 public:
  Antiderivative(std::function<double(double)> g, std::vector<double> disc,
                 double lo, double hi, std::size_t nodes_per_unit = 64);
  double operator()(double x) const;

 private:
  std::function<double(double)> g_;
  std::vector<double> boundaries_;  // panel edges, sorted, covering [lo, hi]
  std::vector<double> cumulative_;  // G at each boundary
  double lo_, hi_;

  double panel_integral(double a, double b) const;
};

// I = int Z_- g(C) dC by left sums at the master grid; sweeps its QV against
// the zero reference over the given schemes, and cross-checks against
// int Z_- dG(C) with the numeric antiderivative G.
struct ZeroQvIntegralReport {
  CadlagPath integral;
  DeviationReport qv_sweep;
  double antiderivative_route_gap = 0.0;  // sup |I - int Z_- dG(C)|
};

ZeroQvIntegralReport zero_qv_integral_check(
    const CadlagPath& z, const std::function<double(double)>& g,
    const std::vector<double>& g_discontinuities, const CadlagPath& c,
    const std::vector<PartitionScheme>& schemes);

}  // namespace qvlab
