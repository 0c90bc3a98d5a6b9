#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qvlab/path.hpp"

namespace qvlab {

// Scalar transform f together with its right-hand derivative, the
// discontinuity set of f', and (for C2 transforms) f''.
struct TransformSpec {
  enum class Class { C2, C1, PrimitiveOfCadlag };

  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> fprime;  // right-continuous right-hand derivative
  std::optional<std::function<double(double)>> fsecond;
  std::vector<double> fprime_discontinuities;  // sorted
  Class cls = Class::C2;

  // sup of |f'| over [lo, hi], by dense sampling plus the listed
  // discontinuities (one-sided values on both sides).
  double lipschitz_bound(double lo, double hi) const;

  // Checks (f(x+h)-f(x))/h against fprime(x) from the right at sampled points
  // away from the discontinuity set. Returns the worst absolute error.
  double check_right_derivative(double lo, double hi, double h = 1e-6,
                                std::size_t samples = 64) const;
};

CadlagPath transform(const CadlagPath& path, const TransformSpec& spec);

// Builtin catalogue.
TransformSpec identity_transform();
TransformSpec square_transform();
TransformSpec abs_transform();
TransformSpec cubic_transform();

// Piecewise-linear f through the given (x, f(x)) knots, extended linearly
// outside; f' is the cadlag step function of slopes. Class PrimitiveOfCadlag.
TransformSpec table_transform(const std::vector<std::pair<double, double>>& knots);

// Lookup by catalogue name; throws on unknown name.
TransformSpec transform_by_name(const std::string& name);

}  // namespace qvlab
