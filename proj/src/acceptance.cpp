#include "qvlab/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qvlab/calculus.hpp"
#include "qvlab/config.hpp"
#include "qvlab/csv.hpp"
#include "qvlab/decomposition.hpp"
#include "qvlab/experiments.hpp"
#include "qvlab/generators.hpp"
#include "qvlab/parallel.hpp"
#include "qvlab/quadvar.hpp"
#include "qvlab/rng.hpp"
#include "qvlab/transform.hpp"

namespace qvlab {

namespace {

std::string fmt(double v) { return CsvWriter::format(v); }

// --- 1. Brownian QV consistency ------------------------------------------

CriterionResult check_bm_qv(int jobs) {
  CriterionResult r;
  r.id = 1;
  r.name = "brownian_qv_consistency";
  const TimeGrid grid{1.0, std::size_t{1} << 18};
  const RefiningSequence rs = dyadic_refining(grid, 6, 14);
  const std::size_t seeds = 200;
  const std::size_t n_depths = rs.depths.size();

  std::vector<std::vector<double>> terminal(seeds);
  parallel_for_index(seeds, jobs, [&](std::size_t s) {
    const CadlagPath w =
        gen_bm(grid, 1.0, RandomStream::derive(9001, "bm-qv", s));
    const QVReport q = weak_qv(w, rs);
    std::vector<double> vals;
    for (const auto& row : q.rows) vals.push_back(row.s_values.back());
    terminal[s] = std::move(vals);
  });

  std::vector<double> rms(n_depths, 0.0), meshes(n_depths, 0.0),
      median_abs(n_depths, 0.0);
  for (std::size_t d = 0; d < n_depths; ++d) {
    meshes[d] = rs.depths[d].indices.size() > 1
                    ? grid.horizon / static_cast<double>(
                                         rs.depths[d].indices.size() - 1)
                    : grid.horizon;
    std::vector<double> abs_err;
    double ss = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) {
      const double e = terminal[s][d] - grid.horizon;
      ss += e * e;
      abs_err.push_back(std::abs(e));
    }
    rms[d] = std::sqrt(ss / static_cast<double>(seeds));
    median_abs[d] = median(abs_err);
  }
  const double med_terminal = median_abs.back();
  const double slope = convergence_slope(rms, meshes);
  const bool pass_med = med_terminal <= 0.02;
  const bool pass_slope = std::abs(slope - 0.5) <= 0.2;
  r.pass = pass_med && pass_slope;
  std::ostringstream os;
  os << "median |S_14 - 1| = " << med_terminal << " (<= 0.02), "
     << "rms-vs-mesh slope = " << slope << " (0.5 +- 0.2)";
  r.detail = os.str();

  CsvWriter csv({"depth", "mesh", "median_abs_err", "rms_err"});
  for (std::size_t d = 0; d < n_depths; ++d)
    csv.add_row({std::to_string(rs.depth_labels[d]), fmt(meshes[d]),
                 fmt(median_abs[d]), fmt(rms[d])});
  r.files.emplace_back("qv_consistency.csv", csv.str());
  return r;
}

// --- 2. Zero-QV part (fractional noise) ----------------------------------

CriterionResult check_fbm_qv(int jobs) {
  CriterionResult r;
  r.id = 2;
  r.name = "fractional_noise_zero_qv";
  const TimeGrid grid{1.0, std::size_t{1} << 18};
  const RefiningSequence rs = dyadic_refining(grid, 6, 14);
  const std::size_t seeds = 50;

  std::vector<std::vector<double>> terminal(seeds);
  parallel_for_index(seeds, jobs, [&](std::size_t s) {
    const CadlagPath c =
        gen_fbm(grid, 0.75, 1.0, RandomStream::derive(9002, "fbm-qv", s));
    const QVReport q = weak_qv(c, rs);
    std::vector<double> vals;
    for (const auto& row : q.rows) vals.push_back(row.s_values.back());
    terminal[s] = std::move(vals);
  });

  std::size_t decreasing = 0;
  std::vector<double> deepest;
  for (const auto& vals : terminal) {
    bool mono = true;
    for (std::size_t d = 1; d < vals.size(); ++d)
      if (!(vals[d] < vals[d - 1])) mono = false;
    if (mono) ++decreasing;
    deepest.push_back(vals.back());
  }
  const double frac =
      static_cast<double>(decreasing) / static_cast<double>(seeds);
  const double med14 = median(deepest);
  r.pass = frac >= 0.9 && med14 <= 0.05;
  std::ostringstream os;
  os << "strictly-decreasing fraction = " << frac
     << " (>= 0.9), median depth-14 estimate = " << med14 << " (<= 0.05)";
  r.detail = os.str();

  CsvWriter csv({"seed", "depth14_estimate", "strictly_decreasing"});
  for (std::size_t s = 0; s < seeds; ++s) {
    bool mono = true;
    for (std::size_t d = 1; d < terminal[s].size(); ++d)
      if (!(terminal[s][d] < terminal[s][d - 1])) mono = false;
    csv.add_row({std::to_string(s), fmt(terminal[s].back()), mono ? "1" : "0"});
  }
  r.files.emplace_back("fractional_qv.csv", csv.str());
  return r;
}

// --- 3. Exact finite-sum identities --------------------------------------

CriterionResult check_identities(int jobs) {
  CriterionResult r;
  r.id = 3;
  r.name = "finite_sum_identities";
  const TimeGrid grid{1.0, std::size_t{1} << 12};
  ExperimentConfig cfg = desk_scenario_config();
  ProcessSpec spec = cfg.process;
  for (auto& ft : spec.jumps.fixed_times) ft.grid_index = grid.n_steps / 2;
  const std::size_t draws = 100;
  const RefiningSequence rs = dyadic_refining(grid, 8, 8);
  const FixedPartition& p = rs.depths.front();

  std::vector<int> kw_ok(draws, 0), tri_ok(draws, 0);
  std::vector<double> ibp_rel(draws, 0.0);
  parallel_for_index(draws, jobs, [&](std::size_t s) {
    const DirichletPath a = gen_dirichlet(spec, grid, 9003, 2 * s);
    const DirichletPath b = gen_dirichlet(spec, grid, 9003, 2 * s + 1);
    kw_ok[s] = kunita_watanabe_check(a.x, b.x, p).holds ? 1 : 0;
    tri_ok[s] = triangle_check({a.z, a.c, b.x}, p).holds ? 1 : 0;
    const double scale = (1.0 + a.x.sup_norm()) * (1.0 + b.x.sup_norm());
    ibp_rel[s] = ibp_residual(b.x, a.x, p) / scale;
  });

  const bool all_kw = std::all_of(kw_ok.begin(), kw_ok.end(),
                                  [](int v) { return v == 1; });
  const bool all_tri = std::all_of(tri_ok.begin(), tri_ok.end(),
                                   [](int v) { return v == 1; });
  const double worst_ibp = *std::max_element(ibp_rel.begin(), ibp_rel.end());
  r.pass = all_kw && all_tri && worst_ibp <= 1e-9;
  std::ostringstream os;
  os << "Kunita-Watanabe holds on " << draws << "/" << draws
     << " draws: " << (all_kw ? "yes" : "NO") << ", triangle: "
     << (all_tri ? "yes" : "NO") << ", worst IBP residual/scale = " << worst_ibp
     << " (<= 1e-9)";
  r.detail = os.str();

  CsvWriter csv({"draw", "kw_holds", "triangle_holds", "ibp_residual_rel"});
  for (std::size_t s = 0; s < draws; ++s)
    csv.add_row({std::to_string(s), std::to_string(kw_ok[s]),
                 std::to_string(tri_ok[s]), fmt(ibp_rel[s])});
  r.files.emplace_back("identities.csv", csv.str());
  return r;
}

// --- 4. Pathwise Ito (Foellmer) formula ----------------------------------

ProcessSpec bm_cp_spec() {
  ProcessSpec spec;
  spec.bm_sigma = 1.0;
  PoissonJumps pj;
  pj.intensity = 5.0;
  pj.law = JumpLaw::symmetric_pair(0.5);
  spec.jumps.poisson.push_back(pj);
  return spec;
}

CriterionResult check_follmer(int jobs) {
  CriterionResult r;
  r.id = 4;
  r.name = "pathwise_ito_formula";
  const TimeGrid grid{1.0, std::size_t{1} << 18};
  const RefiningSequence rs = dyadic_refining(grid, 6, 14);
  const ProcessSpec spec = bm_cp_spec();
  const TransformSpec f = square_transform();
  const std::size_t seeds = 50;

  std::vector<double> rel(seeds, 0.0);
  parallel_for_index(seeds, jobs, [&](std::size_t s) {
    const DirichletPath dp = gen_dirichlet(spec, grid, 9004, s);
    const FollmerReport fr = follmer_decompose(f, dp.x, rs);
    rel[s] = fr.residual_sup / std::max(transform(dp.x, f).sup_norm(), 1e-12);
  });
  const double med = median(rel);
  r.pass = med <= 5e-3;
  std::ostringstream os;
  os << "median sup residual / sup|f(X)| = " << med << " (<= 5e-3)";
  r.detail = os.str();

  CsvWriter csv({"seed", "residual_rel"});
  for (std::size_t s = 0; s < seeds; ++s)
    csv.add_row({std::to_string(s), fmt(rel[s])});
  r.files.emplace_back("ito_residual.csv", csv.str());
  return r;
}

// --- 5. QV identity for f(X) (abs transform) -----------------------------

CriterionResult check_lowther(int jobs) {
  CriterionResult r;
  r.id = 5;
  r.name = "transformed_qv_identity";
  const TimeGrid grid{1.0, std::size_t{1} << 18};
  const RefiningSequence rs = dyadic_refining(grid, 6, 14);
  const ProcessSpec spec = bm_cp_spec();
  const TransformSpec f = abs_transform();
  const std::size_t seeds = 50;

  std::vector<double> gaps(seeds, 0.0);
  parallel_for_index(seeds, jobs, [&](std::size_t s) {
    const DirichletPath dp = gen_dirichlet(spec, grid, 9005, s);
    gaps[s] = lowther_qv_identity(f, dp.x, rs).gap_relative;
  });
  const double med = median(gaps);
  r.pass = med <= 0.03;
  std::ostringstream os;
  os << "median relative gap = " << med << " (<= 0.03)";
  r.detail = os.str();

  CsvWriter csv({"seed", "gap_relative"});
  for (std::size_t s = 0; s < seeds; ++s)
    csv.add_row({std::to_string(s), fmt(gaps[s])});
  r.files.emplace_back("qv_identity.csv", csv.str());
  return r;
}

// --- 6. Semimartingale/zero-QV decomposition -----------------------------

CriterionResult check_decomposition(int jobs) {
  CriterionResult r;
  r.id = 6;
  r.name = "threshold_decomposition";
  const ExperimentConfig base = desk_scenario_config();
  const RefiningSequence rs = dyadic_refining(base.grid, 6, 14);
  const std::size_t seeds = 50;
  const std::vector<std::string> transforms = {"square", "abs"};
  const std::vector<double> thresholds = {0.4, 1.0};

  CsvWriter csv({"transform", "threshold_a", "max_jump_cancel_rel",
                 "median_gamma_fraction", "max_rewrite_gap", "pass"});
  bool all = true;
  std::ostringstream os;
  for (const auto& tname : transforms) {
    const TransformSpec f = transform_by_name(tname);
    for (double a : thresholds) {
      std::vector<double> cancel(seeds), frac(seeds), gap(seeds);
      parallel_for_index(seeds, jobs, [&](std::size_t s) {
        const DirichletPath dp =
            gen_dirichlet(base.process, base.grid, 9006, s);
        DecompositionOptions opt;
        const DecompositionReport dr = ya_decompose(f, dp, a, opt);
        const double scale = std::max(transform(dp.x, f).sup_norm(), 1e-12);
        cancel[s] = dr.jump_cancellation / scale;
        frac[s] = dr.gamma_qv.estimate / std::max(dr.fx_qv.estimate, 1e-15);
        gap[s] = rewrite_consistency(f, dp, a, opt).sup_gap;
      });
      const double worst_cancel =
          *std::max_element(cancel.begin(), cancel.end());
      const double med_frac = median(frac);
      const double worst_gap = *std::max_element(gap.begin(), gap.end());
      const bool ok =
          worst_cancel <= 1e-9 && med_frac <= 0.05 && worst_gap <= 1e-9;
      all = all && ok;
      csv.add_row({tname, fmt(a), fmt(worst_cancel), fmt(med_frac),
                   fmt(worst_gap), ok ? "1" : "0"});
      os << tname << "/a=" << a << ": cancel " << worst_cancel << ", gamma "
         << med_frac << ", rewrite " << worst_gap << (ok ? " ok; " : " FAIL; ");
    }
  }
  r.pass = all;
  r.detail = os.str();
  r.files.emplace_back("decomposition.csv", csv.str());
  return r;
}

// --- 7. Stability of QV under perturbations ------------------------------

CriterionResult check_stability(int jobs) {
  CriterionResult r;
  r.id = 7;
  r.name = "qv_stability";
  ExperimentConfig cfg = desk_scenario_config();
  cfg.jobs = jobs;
  cfg.base_seed = 9007;
  cfg.family.kind = PerturbationFamily::Kind::AddBM;
  cfg.family.coefficient = 1.0;
  cfg.family.n_min = 2;
  cfg.family.n_max = 10;

  cfg.transform = "square";
  const StabilityReport sq = run_stability(cfg);

  cfg.transform = "abs";
  const StabilityReport ab = run_stability(cfg);
  bool abs_ok = ab.monotone && !ab.rows.empty();
  if (abs_ok) {
    const double first = ab.rows.front().median_qv_diff;
    const double last = ab.rows.back().median_qv_diff;
    abs_ok = last <= 0.10 * std::max(first, 1e-15);
  }

  r.pass = sq.pass && abs_ok;
  std::ostringstream os;
  os << "square: monotone=" << sq.monotone << " bounds=" << sq.bounds_ok
     << " slope=" << sq.slope << " (2.0 +- 0.4); abs: monotone=" << ab.monotone
     << " terminal/initial = "
     << (ab.rows.empty() ? 0.0
                         : ab.rows.back().median_qv_diff /
                               std::max(ab.rows.front().median_qv_diff, 1e-15))
     << " (<= 0.10)";
  r.detail = os.str();
  r.files.emplace_back("stability_square.csv", sq.to_csv());
  r.files.emplace_back("stability_abs.csv", ab.to_csv());
  return r;
}

// --- 8. Determinism -------------------------------------------------------

CriterionResult check_determinism(int jobs) {
  CriterionResult r;
  r.id = 8;
  r.name = "determinism";
  ExperimentConfig cfg = desk_scenario_config();
  cfg.grid = TimeGrid{1.0, std::size_t{1} << 14};
  for (auto& ft : cfg.process.jumps.fixed_times)
    ft.grid_index = cfg.grid.n_steps / 2;
  cfg.k_min = 6;
  cfg.k_max = 12;
  cfg.seeds = 8;
  cfg.jobs = jobs;
  cfg.family.n_min = 2;
  cfg.family.n_max = 6;

  const std::string stab_a = run_stability(cfg).to_csv();
  const std::string stab_b = run_stability(cfg).to_csv();
  const std::string dec_a = run_decomposition_suite(cfg).to_csv();
  const std::string dec_b = run_decomposition_suite(cfg).to_csv();
  const std::string canon = canonical_config_json(cfg);
  const std::string man_a = run_manifest(canon, cfg.base_seed);
  const std::string man_b = run_manifest(canon, cfg.base_seed);

  const bool stab_eq = stab_a == stab_b;
  const bool dec_eq = dec_a == dec_b;
  const bool man_eq = man_a == man_b;
  r.pass = stab_eq && dec_eq && man_eq;
  std::ostringstream os;
  os << "repeated runs byte-identical: stability=" << (stab_eq ? "yes" : "NO")
     << ", decomposition=" << (dec_eq ? "yes" : "NO")
     << ", manifest=" << (man_eq ? "yes" : "NO");
  r.detail = os.str();
  r.files.emplace_back("determinism_stability.csv", stab_a);
  r.files.emplace_back("determinism_decomposition.csv", dec_a);
  return r;
}

}  // namespace

AcceptanceReport run_acceptance(int jobs) {
  AcceptanceReport report;
  report.criteria.push_back(check_bm_qv(jobs));
  report.criteria.push_back(check_fbm_qv(jobs));
  report.criteria.push_back(check_identities(jobs));
  report.criteria.push_back(check_follmer(jobs));
  report.criteria.push_back(check_lowther(jobs));
  report.criteria.push_back(check_decomposition(jobs));
  report.criteria.push_back(check_stability(jobs));
  report.criteria.push_back(check_determinism(jobs));
  report.all_pass = true;
  for (const auto& c : report.criteria)
    if (!c.pass) report.all_pass = false;
  return report;
}

}  // namespace qvlab
