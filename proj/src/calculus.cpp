#include "qvlab/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qvlab {
namespace {

// 16-point Gauss-Legendre on [-1, 1].
constexpr double kGl16Nodes[16] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
    0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
    0.9894009349916499};
constexpr double kGl16Weights[16] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
    0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
    0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
    0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
    0.0271524594117541};

}  // namespace

CadlagPath riemann_integral(const CadlagPath& integrand_left,
                            const CadlagPath& integrator,
                            const FixedPartition& p) {
  if (!(integrand_left.grid() == integrator.grid()))
    throw std::invalid_argument("riemann_integral: grid mismatch");
  p.validate(integrator.grid());
  const std::vector<double> y = integrand_left.values();
  const std::vector<double> x = integrator.values();
  const std::size_t n = integrator.n_steps();

  std::vector<double> vals(n + 1, 0.0);
  double base = 0.0;
  std::size_t cell = 0;
  for (std::size_t s = 1; s <= n; ++s) {
    if (s > p.indices[cell + 1]) {
      const std::size_t a = p.indices[cell];
      const std::size_t b = p.indices[cell + 1];
      base += y[a] * (x[b] - x[a]);
      ++cell;
    }
    const std::size_t a = p.indices[cell];
    vals[s] = base + y[a] * (x[s] - x[a]);
  }

  std::vector<Jump> jumps;
  cell = 0;
  for (const Jump& j : integrator.jumps()) {
    while (p.indices[cell + 1] < j.index) ++cell;
    const double s = y[p.indices[cell]] * j.size;
    if (s != 0.0) jumps.push_back({j.index, s});
  }
  return CadlagPath::from_values(integrator.grid(), vals, std::move(jumps));
}

CadlagPath grid_integral_left(
    const std::function<double(std::size_t)>& at_left_node,
    const std::function<double(std::size_t)>& at_left_limit,
    const CadlagPath& integrator) {
  const std::size_t n = integrator.n_steps();
  std::vector<double> vals(n + 1, 0.0);
  std::vector<Jump> jumps;
  auto jit = integrator.jumps().begin();
  double acc = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    // continuous part of the cell increment
    const double cont_inc = integrator.cont()[i] - integrator.cont()[i - 1];
    acc += at_left_node(i - 1) * cont_inc;
    if (jit != integrator.jumps().end() && jit->index == i) {
      const double js = at_left_limit(i) * jit->size;
      acc += js;
      if (js != 0.0) jumps.push_back({i, js});
      ++jit;
    }
    vals[i] = acc;
  }
  return CadlagPath::from_values(integrator.grid(), vals, std::move(jumps));
}

double ibp_residual(const CadlagPath& y, const CadlagPath& x,
                    const FixedPartition& p) {
  if (!(y.grid() == x.grid()))
    throw std::invalid_argument("ibp_residual: grid mismatch");
  p.validate(x.grid());
  const std::vector<double> xv = x.values();
  const std::vector<double> yv = y.values();
  double iy = 0.0, ix = 0.0, q = 0.0;
  double worst = 0.0;
  for (std::size_t i = 1; i < p.indices.size(); ++i) {
    const std::size_t a = p.indices[i - 1];
    const std::size_t b = p.indices[i];
    iy += yv[a] * (xv[b] - xv[a]);
    ix += xv[a] * (yv[b] - yv[a]);
    q += (xv[b] - xv[a]) * (yv[b] - yv[a]);
    const double lhs = iy + ix + q;
    const double rhs = xv[b] * yv[b] - xv[0] * yv[0];
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double stieltjes_against_increasing(const CadlagPath& integrand,
                                    const std::vector<double>& increasing,
                                    const FixedPartition& p, double tolerance) {
  if (increasing.size() != integrand.n_steps() + 1)
    throw std::invalid_argument("stieltjes: size mismatch");
  p.validate(integrand.grid());
  const std::vector<double> y = integrand.values();
  double scale = 1.0;
  for (double v : increasing) scale = std::max(scale, std::abs(v));
  double acc = 0.0;
  for (std::size_t i = 1; i < p.indices.size(); ++i) {
    const std::size_t a = p.indices[i - 1];
    const std::size_t b = p.indices[i];
    double inc = increasing[b] - increasing[a];
    if (inc < 0.0) {
      if (inc < -tolerance * scale)
        throw std::invalid_argument("stieltjes: integrator decreases beyond tolerance");
      inc = 0.0;
    }
    acc += y[a] * inc;
  }
  return acc;
}

std::vector<double> stieltjes_curve_signed(
    const std::vector<double>& integrand_left,
    const std::vector<double>& against, const FixedPartition& p) {
  if (integrand_left.size() != against.size())
    throw std::invalid_argument("stieltjes_curve_signed: size mismatch");
  std::vector<double> out(against.size(), 0.0);
  double base = 0.0;
  std::size_t cell = 0;
  for (std::size_t s = 1; s < against.size(); ++s) {
    if (s > p.indices[cell + 1]) {
      const std::size_t a = p.indices[cell];
      const std::size_t b = p.indices[cell + 1];
      base += integrand_left[a] * (against[b] - against[a]);
      ++cell;
    }
    const std::size_t a = p.indices[cell];
    out[s] = base + integrand_left[a] * (against[s] - against[a]);
  }
  return out;
}

Antiderivative::Antiderivative(std::function<double(double)> g,
                               std::vector<double> disc, double lo, double hi,
                               std::size_t nodes_per_unit)
    : g_(std::move(g)), lo_(lo), hi_(hi) {
  if (!(hi > lo)) throw std::invalid_argument("Antiderivative: hi <= lo");
  // panel edges: uniform subdivision at the requested node density, with
  // g's discontinuities inserted as hard boundaries
  const double span = hi - lo;
  const std::size_t panels = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(span * nodes_per_unit / 16.0)));
  for (std::size_t i = 0; i <= panels; ++i)
    boundaries_.push_back(lo + span * static_cast<double>(i) / panels);
  for (double d : disc)
    if (d > lo && d < hi) boundaries_.push_back(d);
  std::sort(boundaries_.begin(), boundaries_.end());
  boundaries_.erase(std::unique(boundaries_.begin(), boundaries_.end()),
                    boundaries_.end());

  // G anchored at 0 when it lies inside [lo, hi], else at lo
  cumulative_.assign(boundaries_.size(), 0.0);
  for (std::size_t i = 1; i < boundaries_.size(); ++i)
    cumulative_[i] =
        cumulative_[i - 1] + panel_integral(boundaries_[i - 1], boundaries_[i]);
  double anchor = 0.0;
  if (lo <= 0.0 && 0.0 <= hi) {
    // subtract G(0) so that the constant term is exactly g-free at x = 0
    auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), 0.0);
    const std::size_t k = static_cast<std::size_t>(it - boundaries_.begin()) - 1;
    anchor = cumulative_[k] + panel_integral(boundaries_[k], 0.0);
  }
  for (double& c : cumulative_) c -= anchor;
}

double Antiderivative::panel_integral(double a, double b) const {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 16; ++i)
    acc += half * kGl16Weights[i] * g_(mid + half * kGl16Nodes[i]);
  return acc;
}

double Antiderivative::operator()(double x) const {
  if (x < lo_ || x > hi_)
    throw std::out_of_range("Antiderivative: x outside cached range");
  auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), x);
  std::size_t k = static_cast<std::size_t>(it - boundaries_.begin());
  if (k > 0) --k;
  return cumulative_[k] + panel_integral(boundaries_[k], x);
}

ZeroQvIntegralReport zero_qv_integral_check(
    const CadlagPath& z, const std::function<double(double)>& g,
    const std::vector<double>& g_discontinuities, const CadlagPath& c,
    const std::vector<PartitionScheme>& schemes) {
  if (!(z.grid() == c.grid()))
    throw std::invalid_argument("zero_qv_integral_check: grid mismatch");
  if (!c.jumps().empty())
    throw std::invalid_argument("zero_qv_integral_check: c must be continuous");
  const std::size_t n = c.n_steps();
  const std::vector<double> zv = z.values();
  const std::vector<double> cv = c.values();

  // I = int Z_- g(C) dC, left sums at the finest partition (master grid)
  std::vector<double> ivals(n + 1, 0.0);
  for (std::size_t i = 1; i <= n; ++i)
    ivals[i] = ivals[i - 1] + zv[i - 1] * g(cv[i - 1]) * (cv[i] - cv[i - 1]);
  CadlagPath integral = CadlagPath::from_values(c.grid(), ivals, {});

  DeviationReport sweep = strong_qv_sweep(
      integral, schemes, std::vector<double>(n + 1, 0.0));

  // cross-route: int Z_- dG(C) with the numeric antiderivative
  double lo = cv[0], hi = cv[0];
  for (double v : cv) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double pad = 1e-6 * std::max(1.0, hi - lo);
  Antiderivative bigG(g, g_discontinuities, lo - pad, hi + pad);
  double alt = 0.0;
  double gap = 0.0;
  double prev_g = bigG(cv[0]);
  for (std::size_t i = 1; i <= n; ++i) {
    const double cur_g = bigG(cv[i]);
    alt += zv[i - 1] * (cur_g - prev_g);
    prev_g = cur_g;
    gap = std::max(gap, std::abs(ivals[i] - alt));
  }

  return {std::move(integral), std::move(sweep), gap};
}

}  // namespace qvlab
