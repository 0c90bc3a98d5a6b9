#include "qvlab/path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qvlab {

TimeGrid::TimeGrid(double horizon_, std::size_t n_steps_)
    : horizon(horizon_), n_steps(n_steps_) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("TimeGrid: horizon must be finite and > 0");
  if (n_steps < 2) throw std::invalid_argument("TimeGrid: n_steps must be >= 2");
}

CadlagPath::CadlagPath(TimeGrid grid, std::vector<double> cont,
                       std::vector<Jump> jumps)
    : grid_(grid), cont_(std::move(cont)), jumps_(std::move(jumps)) {
  if (cont_.size() != grid_.n_steps + 1)
    throw std::invalid_argument("CadlagPath: cont size must be n_steps + 1");
  for (double v : cont_)
    if (!std::isfinite(v))
      throw std::invalid_argument("CadlagPath: non-finite continuous value");
  std::size_t prev = 0;
  bool first = true;
  for (const Jump& j : jumps_) {
    if (j.index < 1 || j.index > grid_.n_steps)
      throw std::invalid_argument("CadlagPath: jump index out of range");
    if (!first && j.index <= prev)
      throw std::invalid_argument("CadlagPath: jump indices must be strictly increasing");
    if (j.size == 0.0 || !std::isfinite(j.size))
      throw std::invalid_argument("CadlagPath: jump size must be finite and nonzero");
    prev = j.index;
    first = false;
  }
  build_prefix();
}

CadlagPath CadlagPath::zero(const TimeGrid& grid) {
  return CadlagPath(grid, std::vector<double>(grid.n_steps + 1, 0.0), {});
}

void CadlagPath::build_prefix() {
  jump_prefix_.assign(grid_.n_steps + 1, 0.0);
  double acc = 0.0;
  auto it = jumps_.begin();
  for (std::size_t i = 0; i <= grid_.n_steps; ++i) {
    if (it != jumps_.end() && it->index == i) {
      acc += it->size;
      ++it;
    }
    jump_prefix_[i] = acc;
  }
}

double CadlagPath::value_at(std::size_t i) const {
  if (i > grid_.n_steps) throw std::out_of_range("value_at: index out of range");
  return cont_[i] + jump_prefix_[i];
}

double CadlagPath::left_limit_at(std::size_t i) const {
  if (i < 1 || i > grid_.n_steps)
    throw std::out_of_range("left_limit_at: index out of range");
  return cont_[i] + jump_prefix_[i - 1];
}

double CadlagPath::jump_size_at(std::size_t i) const {
  auto it = std::lower_bound(jumps_.begin(), jumps_.end(), i,
                             [](const Jump& j, std::size_t k) { return j.index < k; });
  if (it != jumps_.end() && it->index == i) return it->size;
  return 0.0;
}

std::vector<double> CadlagPath::values() const {
  std::vector<double> out(grid_.n_steps + 1);
  for (std::size_t i = 0; i <= grid_.n_steps; ++i)
    out[i] = cont_[i] + jump_prefix_[i];
  return out;
}

std::vector<double> CadlagPath::left_limits() const {
  std::vector<double> out(grid_.n_steps + 1);
  out[0] = cont_[0] + jump_prefix_[0];
  for (std::size_t i = 1; i <= grid_.n_steps; ++i)
    out[i] = cont_[i] + jump_prefix_[i - 1];
  return out;
}

double CadlagPath::sup_norm() const {
  double m = std::abs(value_at(0));
  for (std::size_t i = 1; i <= grid_.n_steps; ++i) {
    m = std::max(m, std::abs(cont_[i] + jump_prefix_[i]));
    m = std::max(m, std::abs(cont_[i] + jump_prefix_[i - 1]));
  }
  return m;
}

CadlagPath CadlagPath::combine(double a, const CadlagPath& p, double b,
                               const CadlagPath& q) {
  if (!(p.grid_ == q.grid_))
    throw std::invalid_argument("combine: grid mismatch");
  std::vector<double> cont(p.cont_.size());
  for (std::size_t i = 0; i < cont.size(); ++i)
    cont[i] = a * p.cont_[i] + b * q.cont_[i];
  std::vector<Jump> jumps;
  jumps.reserve(p.jumps_.size() + q.jumps_.size());
  auto ip = p.jumps_.begin();
  auto iq = q.jumps_.begin();
  while (ip != p.jumps_.end() || iq != q.jumps_.end()) {
    if (iq == q.jumps_.end() || (ip != p.jumps_.end() && ip->index < iq->index)) {
      double s = a * ip->size;
      if (s != 0.0) jumps.push_back({ip->index, s});
      ++ip;
    } else if (ip == p.jumps_.end() || iq->index < ip->index) {
      double s = b * iq->size;
      if (s != 0.0) jumps.push_back({iq->index, s});
      ++iq;
    } else {
      double s = a * ip->size + b * iq->size;
      if (s != 0.0) jumps.push_back({ip->index, s});
      ++ip;
      ++iq;
    }
  }
  return CadlagPath(p.grid_, std::move(cont), std::move(jumps));
}

CadlagPath CadlagPath::map(const std::function<double(double)>& f) const {
  std::vector<double> vals = values();
  std::vector<double> fvals(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    fvals[i] = f(vals[i]);
    if (!std::isfinite(fvals[i]))
      throw std::domain_error("map: f undefined (non-finite) on path range");
  }
  std::vector<Jump> fjumps;
  fjumps.reserve(jumps_.size());
  for (const Jump& j : jumps_) {
    const double s = f(value_at(j.index)) - f(left_limit_at(j.index));
    if (s != 0.0) fjumps.push_back({j.index, s});
  }
  return from_values(grid_, fvals, std::move(fjumps));
}

CadlagPath CadlagPath::from_values(const TimeGrid& grid,
                                   const std::vector<double>& values,
                                   std::vector<Jump> jumps) {
  if (values.size() != grid.n_steps + 1)
    throw std::invalid_argument("from_values: size mismatch");
  std::vector<double> cont(values.size());
  double acc = 0.0;
  auto it = jumps.begin();
  for (std::size_t i = 0; i <= grid.n_steps; ++i) {
    if (it != jumps.end() && it->index == i) {
      acc += it->size;
      ++it;
    }
    cont[i] = values[i] - acc;
  }
  return CadlagPath(grid, std::move(cont), std::move(jumps));
}

}  // namespace qvlab
