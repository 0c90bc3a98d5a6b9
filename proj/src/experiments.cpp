#include "qvlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qvlab/calculus.hpp"
#include "qvlab/csv.hpp"
#include "qvlab/parallel.hpp"
#include "qvlab/quadvar.hpp"
#include "qvlab/rng.hpp"

namespace qvlab {

namespace {

constexpr double kFloor = 1e-15;

bool model_laws_discrete(const JumpModel& model) {
  for (const auto& p : model.poisson)
    if (!p.law.is_discrete()) return false;
  for (const auto& ft : model.fixed_times)
    if (!ft.law.is_discrete()) return false;
  return true;
}

}  // namespace

void ExperimentConfig::validate() const {
  process.validate(grid);
  if (k_min < 0 || k_max < k_min)
    throw std::invalid_argument("config: need 0 <= k_min <= k_max (empty depth list)");
  if ((std::size_t{1} << k_max) > grid.n_steps)
    throw std::invalid_argument("config: k_max exceeds grid resolution");
  if (seeds < 1) throw std::invalid_argument("config: seeds must be >= 1");
  if (!(threshold_a > 0.0))
    throw std::invalid_argument("config: threshold_a must be > 0");
  transform_by_name(transform);  // throws on unknown name
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile: empty");
  std::sort(values.begin(), values.end());
  const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double w = rank - static_cast<double>(lo);
  return values[lo] * (1.0 - w) + values[hi] * w;
}

double convergence_slope(const std::vector<double>& values,
                         const std::vector<double>& xs) {
  if (values.size() != xs.size() || values.size() < 3)
    throw std::invalid_argument("convergence_slope: need >= 3 points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(xs[i] > 0.0))
      throw std::invalid_argument("convergence_slope: xs must be positive");
    const double lx = std::log(xs[i]);
    const double ly = std::log(std::max(values[i], kFloor));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30)
    throw std::invalid_argument("convergence_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

StabilityReport run_stability(const ExperimentConfig& config) {
  config.validate();
  const TransformSpec f = transform_by_name(config.transform);
  const RefiningSequence rs =
      dyadic_refining(config.grid, config.k_min, config.k_max);
  const std::size_t n_count =
      static_cast<std::size_t>(config.family.n_max - config.family.n_min + 1);
  const std::size_t n_depths = rs.depths.size();

  struct SeedResult {
    std::vector<double> qv_diff;                // per n, deepest depth
    std::vector<std::vector<double>> by_depth;  // per n, per depth
    std::vector<double> x_qv_diff, bound, ratio, sup_xn, sup_diff;
  };
  std::vector<SeedResult> results(config.seeds);

  parallel_for_index(config.seeds, config.jobs, [&](std::size_t s) {
    SeedResult r;
    const DirichletPath dp =
        gen_dirichlet(config.process, config.grid, config.base_seed, s);
    const CadlagPath fx = transform(dp.x, f);
    const std::uint64_t member_seed =
        RandomStream::derive(config.base_seed, "family-member", s).key();
    const PerturbedFamily fam =
        gen_perturbed_family(dp, config.family, member_seed);
    const std::vector<double> base_vals = dp.x.values();
    const double base_lo = *std::min_element(base_vals.begin(), base_vals.end());
    const double base_hi = *std::max_element(base_vals.begin(), base_vals.end());

    for (std::size_t j = 0; j < fam.members.size(); ++j) {
      const CadlagPath& xn = fam.members[j];
      const CadlagPath fxn = transform(xn, f);
      const CadlagPath diff = CadlagPath::combine(1.0, fxn, -1.0, fx);
      const CadlagPath xdiff = CadlagPath::combine(1.0, xn, -1.0, dp.x);

      std::vector<double> depth_vals;
      const QVReport dq = weak_qv(diff, rs);
      for (const auto& row : dq.rows) depth_vals.push_back(row.s_values.back());
      r.by_depth.push_back(depth_vals);
      r.qv_diff.push_back(dq.estimate);

      const double xq = weak_qv(xdiff, rs).estimate;
      r.x_qv_diff.push_back(xq);

      const std::vector<double> xn_vals = xn.values();
      const double lo = std::min(
          base_lo, *std::min_element(xn_vals.begin(), xn_vals.end()));
      const double hi = std::max(
          base_hi, *std::max_element(xn_vals.begin(), xn_vals.end()));
      const double m_lip = f.lipschitz_bound(lo, hi);
      const double bound = 2.0 * m_lip * m_lip * xq;
      r.bound.push_back(bound);
      r.ratio.push_back(bound > kFloor ? dq.estimate / bound
                                       : (dq.estimate > kFloor ? 1e30 : 0.0));
      r.sup_xn.push_back(xn.sup_norm());
      r.sup_diff.push_back(xdiff.sup_norm());
    }
    results[s] = std::move(r);
  });

  StabilityReport report;
  std::vector<double> med_vals, eps_vals;
  for (std::size_t j = 0; j < n_count; ++j) {
    StabilityRow row;
    row.n = config.family.n_min + static_cast<int>(j);
    row.eps = config.family.eps(row.n);
    std::vector<double> qd, xq, bd, rt, sx, sd;
    for (const auto& r : results) {
      qd.push_back(r.qv_diff[j]);
      xq.push_back(r.x_qv_diff[j]);
      bd.push_back(r.bound[j]);
      rt.push_back(r.ratio[j]);
      sx.push_back(r.sup_xn[j]);
      sd.push_back(r.sup_diff[j]);
    }
    row.median_qv_diff = median(qd);
    row.median_x_qv_diff = median(xq);
    row.median_bound = median(bd);
    row.median_ratio = median(rt);
    row.p99_sup_xn = percentile(sx, 99.0);
    row.median_sup_diff = median(sd);
    report.rows.push_back(row);
    med_vals.push_back(row.median_qv_diff);
    eps_vals.push_back(row.eps);

    std::vector<double> depth_meds;
    for (std::size_t d = 0; d < n_depths; ++d) {
      std::vector<double> vals;
      for (const auto& r : results) vals.push_back(r.by_depth[j][d]);
      depth_meds.push_back(median(vals));
    }
    report.per_depth_medians.push_back(std::move(depth_meds));
  }

  report.monotone = true;
  for (std::size_t j = 1; j < med_vals.size(); ++j)
    if (med_vals[j] > med_vals[j - 1] * (1.0 + 1e-9) + kFloor)
      report.monotone = false;

  report.bounds_ok = true;
  for (const auto& row : report.rows)
    if (row.median_ratio > config.tolerances.stability_bound_factor)
      report.bounds_ok = false;

  bool all_floor = true;
  for (double v : med_vals)
    if (v > kFloor) all_floor = false;
  if (all_floor) {
    // degenerate family (eps = 0): nothing to regress, slope treated as met
    report.slope = 0.0;
    report.slope_ok = true;
  } else {
    report.slope = convergence_slope(med_vals, eps_vals);
    report.slope_ok = std::abs(report.slope - config.tolerances.stability_slope) <=
                      config.tolerances.stability_slope_window;
  }
  report.pass = report.monotone && report.bounds_ok && report.slope_ok;
  if (config.family.kind == PerturbationFamily::Kind::JumpScale)
    report.hypothesis_note =
        "JumpScale family: strong-sense Dirichlet hypothesis unverified";
  return report;
}

std::string StabilityReport::to_csv() const {
  CsvWriter csv({"record", "n", "eps", "median_qv_diff", "median_x_qv_diff",
                 "median_bound", "median_ratio", "p99_sup_xn",
                 "median_sup_diff"});
  for (const auto& row : rows)
    csv.add_row({"per_n", std::to_string(row.n), CsvWriter::format(row.eps),
                 CsvWriter::format(row.median_qv_diff),
                 CsvWriter::format(row.median_x_qv_diff),
                 CsvWriter::format(row.median_bound),
                 CsvWriter::format(row.median_ratio),
                 CsvWriter::format(row.p99_sup_xn),
                 CsvWriter::format(row.median_sup_diff)});
  csv.add_row({"slope", "", "", CsvWriter::format(slope), "", "", "", "", ""});
  csv.add_row({"verdict_monotone", "", "", monotone ? "1" : "0", "", "", "", "",
               ""});
  csv.add_row({"verdict_bounds", "", "", bounds_ok ? "1" : "0", "", "", "", "",
               ""});
  csv.add_row({"verdict_slope", "", "", slope_ok ? "1" : "0", "", "", "", "",
               ""});
  csv.add_row({"verdict_pass", "", "", pass ? "1" : "0", "", "", "", "", ""});
  if (!hypothesis_note.empty())
    csv.add_row({"note", "", "", hypothesis_note, "", "", "", "", ""});
  return csv.str();
}

DecompositionSuiteReport run_decomposition_suite(const ExperimentConfig& config) {
  config.validate();
  const TransformSpec f = transform_by_name(config.transform);
  const RefiningSequence rs =
      dyadic_refining(config.grid, config.k_min, config.k_max);
  DecompositionOptions opt = config.decomposition;
  opt.k_min = config.k_min;
  opt.k_max = config.k_max;

  const bool run_follmer =
      f.cls == TransformSpec::Class::C2 && f.fsecond.has_value();
  const bool has_zero_qv =
      config.process.zero_qv.kind != ZeroQvSpec::Kind::None;

  struct SeedOut {
    double follmer_rel = 0.0;
    double lowther_gap = 0.0;
    double jump_cancel_rel = 0.0;
    double gamma_ratio = 0.0;
    double rewrite_gap = 0.0;
    double zeroqv_ratio = 0.0;
  };
  std::vector<SeedOut> outs(config.seeds);

  parallel_for_index(config.seeds, config.jobs, [&](std::size_t s) {
    SeedOut o;
    const DirichletPath dp =
        gen_dirichlet(config.process, config.grid, config.base_seed, s);
    const CadlagPath fx = transform(dp.x, f);
    const double fx_scale = std::max(fx.sup_norm(), 1e-12);

    if (run_follmer) {
      const FollmerReport fr = follmer_decompose(f, dp.x, rs, opt);
      o.follmer_rel = fr.residual_sup / fx_scale;
    }
    const LowtherReport lr = lowther_qv_identity(f, dp.x, rs, opt);
    o.lowther_gap = lr.gap_relative;

    const DecompositionReport dr = ya_decompose(f, dp, config.threshold_a, opt);
    o.jump_cancel_rel = dr.jump_cancellation / fx_scale;
    o.gamma_ratio = dr.gamma_qv.estimate / std::max(dr.fx_qv.estimate, kFloor);

    o.rewrite_gap = rewrite_consistency(f, dp, config.threshold_a, opt).sup_gap;

    if (has_zero_qv) {
      std::vector<PartitionScheme> schemes = config.schemes;
      if (schemes.empty()) {
        PartitionScheme deep;
        deep.kind = PartitionScheme::Kind::Dyadic;
        deep.depth = config.k_max;
        schemes.push_back(deep);
      }
      const ZeroQvIntegralReport zr = zero_qv_integral_check(
          dp.z, f.fprime, f.fprime_discontinuities, dp.c, schemes);
      const double zq = weak_qv(dp.z, rs).estimate;
      o.zeroqv_ratio =
          weak_qv(zr.integral, rs).estimate / std::max(zq, kFloor);
    }
    outs[s] = o;
  });

  DecompositionSuiteReport report;
  auto collect = [&](auto member) {
    std::vector<double> vals;
    for (const auto& o : outs) vals.push_back(o.*member);
    return vals;
  };
  const ToleranceSet& tol = config.tolerances;

  if (run_follmer)
    report.verdicts.push_back({"follmer_residual_rel_median",
                               median(collect(&SeedOut::follmer_rel)) <=
                                   tol.follmer_residual_rel,
                               median(collect(&SeedOut::follmer_rel)),
                               tol.follmer_residual_rel});
  report.verdicts.push_back({"lowther_gap_rel_median",
                             median(collect(&SeedOut::lowther_gap)) <=
                                 tol.lowther_gap_rel,
                             median(collect(&SeedOut::lowther_gap)),
                             tol.lowther_gap_rel});
  const std::vector<double> cancels = collect(&SeedOut::jump_cancel_rel);
  const double worst_cancel =
      *std::max_element(cancels.begin(), cancels.end());
  report.verdicts.push_back({"jump_cancellation_rel_max",
                             worst_cancel <= tol.jump_cancellation_rel,
                             worst_cancel, tol.jump_cancellation_rel});
  report.verdicts.push_back({"gamma_qv_fraction_median",
                             median(collect(&SeedOut::gamma_ratio)) <=
                                 tol.gamma_qv_fraction,
                             median(collect(&SeedOut::gamma_ratio)),
                             tol.gamma_qv_fraction});
  const double rewrite_tol = model_laws_discrete(config.process.jumps)
                                 ? tol.rewrite_gap_discrete
                                 : tol.rewrite_gap_density;
  const std::vector<double> gaps = collect(&SeedOut::rewrite_gap);
  const double worst_rewrite =
      *std::max_element(gaps.begin(), gaps.end());
  report.verdicts.push_back({"rewrite_gap_max",
                             worst_rewrite <= rewrite_tol, worst_rewrite,
                             rewrite_tol});
  if (has_zero_qv)
    report.verdicts.push_back({"zero_qv_integral_ratio_median",
                               median(collect(&SeedOut::zeroqv_ratio)) <=
                                   tol.gamma_qv_fraction,
                               median(collect(&SeedOut::zeroqv_ratio)),
                               tol.gamma_qv_fraction});

  report.pass = true;
  for (const auto& v : report.verdicts)
    if (!v.pass) report.pass = false;
  return report;
}

std::string DecompositionSuiteReport::to_csv() const {
  CsvWriter csv({"check", "pass", "measured", "threshold"});
  for (const auto& v : verdicts)
    csv.add_row({v.name, v.pass ? "1" : "0", CsvWriter::format(v.measured),
                 CsvWriter::format(v.threshold)});
  csv.add_row({"suite", pass ? "1" : "0", "", ""});
  return csv.str();
}

std::string run_manifest(const std::string& canonical_config,
                         std::uint64_t seed) {
  std::ostringstream os;
  os << "{\"version\":\"0.1.0\",\"seed\":" << seed << ",\"config_hash\":\""
     << std::hex << fnv1a(canonical_config) << std::dec
     << "\",\"config\":" << canonical_config << "}\n";
  return os.str();
}

}  // namespace qvlab
