#include "qvlab/transform.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace qvlab {

double TransformSpec::lipschitz_bound(double lo, double hi) const {
  if (lo > hi) std::swap(lo, hi);
  const std::size_t n = 4096;
  double m = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / n;
    m = std::max(m, std::abs(fprime(x)));
  }
  for (double d : fprime_discontinuities) {
    if (d < lo || d > hi) continue;
    m = std::max(m, std::abs(fprime(d)));
    const double eps = 1e-9 * std::max(1.0, std::abs(d));
    m = std::max(m, std::abs(fprime(d - eps)));
  }
  return m;
}

double TransformSpec::check_right_derivative(double lo, double hi, double h,
                                             std::size_t samples) const {
  double worst = 0.0;
  for (std::size_t i = 0; i <= samples; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / samples;
    bool near_disc = false;
    for (double d : fprime_discontinuities)
      if (std::abs(x - d) < 1e-3) near_disc = true;
    if (near_disc) continue;
    const double fd = (f(x + h) - f(x)) / h;
    worst = std::max(worst, std::abs(fd - fprime(x)));
  }
  return worst;
}

CadlagPath transform(const CadlagPath& path, const TransformSpec& spec) {
  return path.map(spec.f);
}

TransformSpec identity_transform() {
  TransformSpec t;
  t.name = "identity";
  t.f = [](double x) { return x; };
  t.fprime = [](double) { return 1.0; };
  t.fsecond = [](double) { return 0.0; };
  t.cls = TransformSpec::Class::C2;
  return t;
}

TransformSpec square_transform() {
  TransformSpec t;
  t.name = "square";
  t.f = [](double x) { return x * x; };
  t.fprime = [](double x) { return 2.0 * x; };
  t.fsecond = [](double) { return 2.0; };
  t.cls = TransformSpec::Class::C2;
  return t;
}

TransformSpec abs_transform() {
  TransformSpec t;
  t.name = "abs";
  t.f = [](double x) { return std::abs(x); };
  // right-hand derivative: sign(x) with f'(0) = +1
  t.fprime = [](double x) { return x >= 0.0 ? 1.0 : -1.0; };
  t.fprime_discontinuities = {0.0};
  t.cls = TransformSpec::Class::PrimitiveOfCadlag;
  return t;
}

TransformSpec cubic_transform() {
  TransformSpec t;
  t.name = "cubic";
  t.f = [](double x) { return x * x * x; };
  t.fprime = [](double x) { return 3.0 * x * x; };
  t.fsecond = [](double x) { return 6.0 * x; };
  t.cls = TransformSpec::Class::C2;
  return t;
}

TransformSpec table_transform(
    const std::vector<std::pair<double, double>>& knots) {
  if (knots.size() < 2)
    throw std::invalid_argument("table_transform: need at least two knots");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i].first > knots[i - 1].first))
      throw std::invalid_argument("table_transform: knot x must be strictly increasing");
  auto xs = std::make_shared<std::vector<double>>();
  auto ys = std::make_shared<std::vector<double>>();
  auto slopes = std::make_shared<std::vector<double>>();
  for (auto& [x, y] : knots) {
    xs->push_back(x);
    ys->push_back(y);
  }
  for (std::size_t i = 1; i < xs->size(); ++i)
    slopes->push_back(((*ys)[i] - (*ys)[i - 1]) / ((*xs)[i] - (*xs)[i - 1]));

  TransformSpec t;
  t.name = "custom-table";
  t.f = [xs, ys, slopes](double x) {
    if (x <= xs->front()) return ys->front() + slopes->front() * (x - xs->front());
    if (x >= xs->back()) return ys->back() + slopes->back() * (x - xs->back());
    auto it = std::upper_bound(xs->begin(), xs->end(), x);
    const std::size_t k = static_cast<std::size_t>(it - xs->begin()) - 1;
    return (*ys)[k] + (*slopes)[k] * (x - (*xs)[k]);
  };
  // cadlag step function of slopes: f'(x) = slope of the segment to the right
  t.fprime = [xs, slopes](double x) {
    if (x < xs->front()) return slopes->front();
    if (x >= xs->back()) return slopes->back();
    auto it = std::upper_bound(xs->begin(), xs->end(), x);
    const std::size_t k = static_cast<std::size_t>(it - xs->begin()) - 1;
    return (*slopes)[std::min(k, slopes->size() - 1)];
  };
  // interior knots where adjacent slopes differ are f' discontinuities
  for (std::size_t i = 1; i + 1 < xs->size(); ++i)
    if ((*slopes)[i] != (*slopes)[i - 1])
      t.fprime_discontinuities.push_back((*xs)[i]);
  t.cls = TransformSpec::Class::PrimitiveOfCadlag;
  return t;
}

TransformSpec transform_by_name(const std::string& name) {
  if (name == "identity") return identity_transform();
  if (name == "square") return square_transform();
  if (name == "abs") return abs_transform();
  if (name == "cubic") return cubic_transform();
  throw std::invalid_argument("unknown transform: " + name);
}

}  // namespace qvlab
