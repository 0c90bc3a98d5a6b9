#include "qvlab/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qvlab {
namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr double kGlNodes[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeights[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

double normal_pdf(double x, double sigma) {
  const double z = x / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

double normal_cdf(double x, double sigma) {
  return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
}

// Integration region of |x| <= cutoff intersected with the law's support,
// possibly split at 0 so panels never straddle the origin.
struct Segment {
  double lo, hi;
};

std::vector<Segment> density_segments(const DensityLaw& d, double cutoff) {
  double lo, hi;
  if (d.kind == DensityLaw::Kind::TruncatedNormal) {
    lo = -std::min(d.bound, cutoff);
    hi = std::min(d.bound, cutoff);
  } else {
    lo = std::max(d.lo, -cutoff);
    hi = std::min(d.hi, cutoff);
  }
  std::vector<Segment> segs;
  if (lo >= hi) return segs;
  if (lo < 0.0 && hi > 0.0) {
    segs.push_back({lo, 0.0});
    segs.push_back({0.0, hi});
  } else {
    segs.push_back({lo, hi});
  }
  return segs;
}

double density_pdf(const DensityLaw& d, double x) {
  if (d.kind == DensityLaw::Kind::TruncatedNormal) {
    const double mass =
        normal_cdf(d.bound, d.sigma) - normal_cdf(-d.bound, d.sigma);
    return normal_pdf(x, d.sigma) / mass;
  }
  return 1.0 / (d.hi - d.lo);
}

}  // namespace

JumpLaw::JumpLaw(DiscreteAtoms atoms) : law_(std::move(atoms)) {
  const auto& a = std::get<DiscreteAtoms>(law_);
  if (a.atoms.empty()) throw std::invalid_argument("JumpLaw: no atoms");
  double total = 0.0;
  for (auto& [v, p] : a.atoms) {
    if (v == 0.0) throw std::invalid_argument("JumpLaw: atom at 0 not allowed");
    if (p < 0.0) throw std::invalid_argument("JumpLaw: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("JumpLaw: probabilities must sum to 1");
}

JumpLaw::JumpLaw(DensityLaw density) : law_(density) {
  const auto& d = std::get<DensityLaw>(law_);
  if (d.kind == DensityLaw::Kind::TruncatedNormal) {
    if (!(d.sigma > 0.0) || !(d.bound > 0.0))
      throw std::invalid_argument("JumpLaw: truncated normal needs sigma, bound > 0");
  } else if (!(d.hi > d.lo)) {
    throw std::invalid_argument("JumpLaw: uniform needs hi > lo");
  }
}

JumpLaw JumpLaw::point_mass(double value) {
  return JumpLaw(DiscreteAtoms{{{value, 1.0}}});
}

JumpLaw JumpLaw::symmetric_pair(double value) {
  return JumpLaw(DiscreteAtoms{{{value, 0.5}, {-value, 0.5}}});
}

double JumpLaw::sample(RandomStream& stream) const {
  if (const auto* a = discrete()) {
    const double u = stream.next_unit();
    double acc = 0.0;
    for (auto& [v, p] : a->atoms) {
      acc += p;
      if (u <= acc) return v;
    }
    return a->atoms.back().first;
  }
  const auto& d = *density();
  for (;;) {
    double x;
    if (d.kind == DensityLaw::Kind::TruncatedNormal) {
      x = d.sigma * stream.next_normal();
      if (std::abs(x) > d.bound) continue;
    } else {
      x = d.lo + (d.hi - d.lo) * stream.next_unit();
    }
    if (x != 0.0) return x;  // size-0 jumps are non-jumps
  }
}

double JumpLaw::expect_truncated(const std::function<double(double)>& g,
                                 double cutoff, std::size_t panels) const {
  if (const auto* a = discrete()) {
    double acc = 0.0;
    for (auto& [v, p] : a->atoms)
      if (std::abs(v) <= cutoff) acc += p * g(v);
    return acc;
  }
  const auto& d = *density();
  double acc = 0.0;
  for (const Segment& seg : density_segments(d, cutoff)) {
    const double panel_w = (seg.hi - seg.lo) / static_cast<double>(panels);
    for (std::size_t k = 0; k < panels; ++k) {
      const double a0 = seg.lo + panel_w * static_cast<double>(k);
      const double mid = a0 + 0.5 * panel_w;
      const double half = 0.5 * panel_w;
      for (int i = 0; i < 8; ++i) {
        const double x = mid + half * kGlNodes[i];
        acc += half * kGlWeights[i] * g(x) * density_pdf(d, x);
      }
    }
  }
  return acc;
}

double JumpLaw::expect_truncated_midpoint(const std::function<double(double)>& g,
                                          double cutoff,
                                          std::size_t panels) const {
  if (const auto* a = discrete()) {
    double acc = 0.0;
    for (auto& [v, p] : a->atoms)
      if (std::abs(v) <= cutoff) acc += p * g(v);
    return acc;
  }
  const auto& d = *density();
  double acc = 0.0;
  for (const Segment& seg : density_segments(d, cutoff)) {
    const double panel_w = (seg.hi - seg.lo) / static_cast<double>(panels);
    for (std::size_t k = 0; k < panels; ++k) {
      const double x = seg.lo + panel_w * (static_cast<double>(k) + 0.5);
      acc += panel_w * g(x) * density_pdf(d, x);
    }
  }
  return acc;
}

void JumpModel::validate(std::size_t n_steps) const {
  if (poisson.size() > 1)
    throw std::invalid_argument("JumpModel: at most one Poisson component");
  for (const auto& p : poisson)
    if (p.intensity < 0.0)
      throw std::invalid_argument("JumpModel: negative intensity");
  std::vector<std::size_t> seen;
  for (const auto& ft : fixed_times) {
    if (ft.grid_index < 1 || ft.grid_index > n_steps)
      throw std::invalid_argument("JumpModel: fixed-time index out of range");
    if (ft.fire_prob < 0.0 || ft.fire_prob > 1.0)
      throw std::invalid_argument("JumpModel: fire_prob must be in [0, 1]");
    seen.push_back(ft.grid_index);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw std::invalid_argument("JumpModel: duplicate fixed-time indices");
}

std::vector<std::size_t> JumpModel::predictable_indices() const {
  std::vector<std::size_t> out;
  for (const auto& ft : fixed_times) out.push_back(ft.grid_index);
  std::sort(out.begin(), out.end());
  return out;
}

CompensatorView compensator_queries(const JumpModel& model) {
  CompensatorView view;
  if (!model.poisson.empty()) {
    view.poisson_intensity = model.poisson.front().intensity;
    view.poisson_law = &model.poisson.front().law;
  }
  for (const auto& ft : model.fixed_times)
    view.atoms.push_back({ft.grid_index, ft.fire_prob, &ft.law});
  view.calA = model.predictable_indices();
  return view;
}

}  // namespace qvlab
