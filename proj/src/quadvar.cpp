#include "qvlab/quadvar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qvlab {
namespace {

constexpr double kNegClamp = -1e-12;

double clamp_qv(double v) { return (v < 0.0 && v > kNegClamp) ? 0.0 : v; }

// Generic cross-increment curve on the full grid. For grid index s inside a
// partition cell [tau, tau'], the running cell increment is X_s - X_tau.
std::vector<double> cross_curve(const std::vector<double>& xv,
                                const std::vector<double>& yv,
                                const FixedPartition& p) {
  std::vector<double> out(xv.size(), 0.0);
  double base = 0.0;
  std::size_t cell = 0;  // partition cell index: [indices[cell], indices[cell+1]]
  for (std::size_t s = 1; s < xv.size(); ++s) {
    if (s > p.indices[cell + 1]) {
      const std::size_t a = p.indices[cell];
      const std::size_t b = p.indices[cell + 1];
      base += (xv[b] - xv[a]) * (yv[b] - yv[a]);
      ++cell;
    }
    const std::size_t a = p.indices[cell];
    out[s] = base + (xv[s] - xv[a]) * (yv[s] - yv[a]);
  }
  return out;
}

double cross_at(const std::vector<double>& xv, const std::vector<double>& yv,
                const FixedPartition& p, std::size_t s) {
  double acc = 0.0;
  for (std::size_t i = 1; i < p.indices.size(); ++i) {
    const std::size_t a = p.indices[i - 1];
    if (a >= s) break;
    const std::size_t b = std::min(p.indices[i], s);
    acc += (xv[b] - xv[a]) * (yv[b] - yv[a]);
  }
  return acc;
}

}  // namespace

double partition_qv(const CadlagPath& path, const FixedPartition& p,
                    std::size_t s_index) {
  p.validate(path.grid());
  if (s_index > path.n_steps())
    throw std::out_of_range("partition_qv: s out of range");
  const std::vector<double> v = path.values();
  return cross_at(v, v, p, s_index);
}

double partition_covar(const CadlagPath& x, const CadlagPath& y,
                       const FixedPartition& p, std::size_t s_index) {
  if (!(x.grid() == y.grid()))
    throw std::invalid_argument("partition_covar: grid mismatch");
  p.validate(x.grid());
  if (s_index > x.n_steps())
    throw std::out_of_range("partition_covar: s out of range");
  return cross_at(x.values(), y.values(), p, s_index);
}

std::vector<double> qv_curve(const CadlagPath& path, const FixedPartition& p) {
  p.validate(path.grid());
  const std::vector<double> v = path.values();
  return cross_curve(v, v, p);
}

std::vector<double> covar_curve(const CadlagPath& x, const CadlagPath& y,
                                const FixedPartition& p) {
  if (!(x.grid() == y.grid()))
    throw std::invalid_argument("covar_curve: grid mismatch");
  p.validate(x.grid());
  return cross_curve(x.values(), y.values(), p);
}

QVReport weak_qv(const CadlagPath& path, const RefiningSequence& rs) {
  if (rs.depths.empty()) throw std::invalid_argument("weak_qv: empty sequence");
  QVReport report;
  const std::vector<double> v = path.values();
  for (std::size_t d = 0; d < rs.depths.size(); ++d) {
    const FixedPartition& p = rs.depths[d];
    p.validate(path.grid());
    QVReport::DepthRow row;
    row.label = rs.depth_labels.size() == rs.depths.size()
                    ? "depth_" + std::to_string(rs.depth_labels[d])
                    : "partition_" + std::to_string(d);
    row.mesh = mesh(p, path.grid());
    row.s_indices = p.indices;
    row.s_values.resize(p.indices.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 1; i < p.indices.size(); ++i) {
      const double dv = v[p.indices[i]] - v[p.indices[i - 1]];
      acc += dv * dv;
      row.s_values[i] = acc;
    }
    report.rows.push_back(std::move(row));
  }
  for (std::size_t d = 1; d < report.rows.size(); ++d)
    report.cauchy.push_back(std::abs(report.rows[d].s_values.back() -
                                     report.rows[d - 1].s_values.back()));
  report.estimate = report.rows.back().s_values.back();
  for (const Jump& j : path.jumps()) report.jump_part += j.size * j.size;
  report.cont_part_estimate = clamp_qv(report.estimate - report.jump_part);
  return report;
}

DeviationReport strong_qv_sweep(const CadlagPath& path,
                                const std::vector<PartitionScheme>& schemes,
                                const std::vector<double>& reference_curve) {
  if (reference_curve.size() != path.n_steps() + 1)
    throw std::invalid_argument("strong_qv_sweep: reference curve size mismatch");
  DeviationReport report;
  const std::vector<double> v = path.values();
  for (const PartitionScheme& scheme : schemes) {
    const FixedPartition p = build_partition(scheme, path);
    SchemeDeviation dev;
    dev.label = scheme.label();
    dev.mesh = mesh(p, path.grid());
    double acc = 0.0;
    double sup = std::abs(reference_curve[0]);
    for (std::size_t i = 1; i < p.indices.size(); ++i) {
      const double dv = v[p.indices[i]] - v[p.indices[i - 1]];
      acc += dv * dv;
      sup = std::max(sup, std::abs(acc - reference_curve[p.indices[i]]));
    }
    dev.sup_deviation = sup;
    report.max_deviation = std::max(report.max_deviation, sup);
    report.schemes.push_back(std::move(dev));
  }
  return report;
}

SlackResult kunita_watanabe_check(const CadlagPath& x, const CadlagPath& y,
                                  const FixedPartition& p) {
  const double cov = partition_covar(x, y, p, x.n_steps());
  const double qx = partition_qv(x, p, x.n_steps());
  const double qy = partition_qv(y, p, y.n_steps());
  const double rhs = std::sqrt(qx) * std::sqrt(qy);
  SlackResult r;
  r.slack = rhs - std::abs(cov);
  const double scale = std::max({1.0, qx, qy});
  r.holds = r.slack >= -1e-9 * scale;
  return r;
}

SlackResult triangle_check(const std::vector<CadlagPath>& paths,
                           const FixedPartition& p) {
  if (paths.empty()) throw std::invalid_argument("triangle_check: empty input");
  CadlagPath sum = paths.front();
  double sqrt_sum = std::sqrt(partition_qv(paths.front(), p, sum.n_steps()));
  for (std::size_t k = 1; k < paths.size(); ++k) {
    sum = CadlagPath::combine(1.0, sum, 1.0, paths[k]);
    sqrt_sum += std::sqrt(partition_qv(paths[k], p, sum.n_steps()));
  }
  const double lhs = partition_qv(sum, p, sum.n_steps());
  SlackResult r;
  r.slack = sqrt_sum * sqrt_sum - lhs;
  const double scale = std::max(1.0, sqrt_sum * sqrt_sum);
  r.holds = r.slack >= -1e-9 * scale;
  return r;
}

}  // namespace qvlab
