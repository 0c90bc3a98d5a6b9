#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "qvlab/experiments.hpp"
#include "qvlab/generators.hpp"
#include "qvlab/quadvar.hpp"
#include "qvlab/rng.hpp"

using namespace qvlab;

TEST_CASE("gen_bm: zero volatility, determinism, expected quadratic variation") {
  const TimeGrid grid{1.0, 1024};
  CHECK(gen_bm(grid, 0.0, RandomStream::derive(1, "bm", 0)).sup_norm() == 0.0);

  const CadlagPath a = gen_bm(grid, 1.0, RandomStream::derive(2, "bm", 7));
  const CadlagPath b = gen_bm(grid, 1.0, RandomStream::derive(2, "bm", 7));
  CHECK(a.values() == b.values());

  // E S = sigma^2 * t exactly; ensemble mean within 3 standard errors.
  const double sigma = 0.8;
  const std::size_t seeds = 200;
  const RefiningSequence rs = dyadic_refining(grid, 10, 10);
  double mean = 0.0, ss = 0.0;
  std::vector<double> vals;
  for (std::size_t s = 0; s < seeds; ++s) {
    const CadlagPath w = gen_bm(grid, sigma, RandomStream::derive(3, "bm", s));
    vals.push_back(partition_qv(w, rs.depths[0], grid.n_steps));
    mean += vals.back();
  }
  mean /= double(seeds);
  for (double v : vals) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / double(seeds - 1) / double(seeds));
  CHECK(std::abs(mean - sigma * sigma) <= 3.0 * se + 1e-6);
}

TEST_CASE("gen_fbm: contract and increment variance against the closed form") {
  const TimeGrid grid{1.0, 1024};
  CHECK_THROWS(gen_fbm(grid, 0.5, 1.0, RandomStream::derive(4, "f", 0)));
  CHECK_THROWS(gen_fbm(grid, 1.0, 1.0, RandomStream::derive(4, "f", 0)));

  const double hurst = 0.75, scale = 0.6;
  const double dt = grid.step();
  const double expected = scale * scale * std::pow(dt, 2.0 * hurst);
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s < 100; ++s) {
    const CadlagPath c = gen_fbm(grid, hurst, scale, RandomStream::derive(5, "f", s));
    const std::vector<double> v = c.values();
    for (std::size_t i = 1; i < v.size(); ++i) {
      const double d = v[i] - v[i - 1];
      acc += d * d;
      ++count;
    }
  }
  const double mean_sq = acc / double(count);
  CHECK(mean_sq == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("gen_fbm: dyadic QV estimates decrease with depth on most seeds") {
  const TimeGrid grid{1.0, std::size_t{1} << 12};
  const RefiningSequence rs = dyadic_refining(grid, 5, 12);
  std::size_t decreasing = 0;
  const std::size_t seeds = 50;
  for (std::size_t s = 0; s < seeds; ++s) {
    const CadlagPath c = gen_fbm(grid, 0.75, 1.0, RandomStream::derive(6, "f", s));
    const QVReport q = weak_qv(c, rs);
    bool mono = true;
    for (std::size_t d = 1; d < q.rows.size(); ++d)
      if (!(q.rows[d].s_values.back() < q.rows[d - 1].s_values.back())) mono = false;
    if (mono) ++decreasing;
  }
  CHECK(double(decreasing) / double(seeds) >= 0.9);
}

TEST_CASE("gen_fbm: non-dyadic grid uses the factorization fallback") {
  const TimeGrid grid{1.0, 300};
  const CadlagPath c = gen_fbm(grid, 0.75, 1.0, RandomStream::derive(7, "f", 0));
  CHECK(c.jumps().empty());
  CHECK(c.value_at(0) == 0.0);
  CHECK(c.sup_norm() > 0.0);
}

TEST_CASE("gen_jumps: empty model, deterministic fixed time, Poisson count") {
  const TimeGrid grid{1.0, 1024};
  JumpModel empty;
  const RealizedJumps none = gen_jumps(grid, empty, RandomStream::derive(8, "p", 0),
                                       RandomStream::derive(8, "q", 0));
  CHECK(none.merged.empty());

  JumpModel fixed;
  FixedTimeJump ft;
  ft.grid_index = 512;
  ft.fire_prob = 1.0;
  ft.law = JumpLaw::point_mass(2.0);
  fixed.fixed_times.push_back(ft);
  const RealizedJumps one = gen_jumps(grid, fixed, RandomStream::derive(9, "p", 0),
                                      RandomStream::derive(9, "q", 0));
  REQUIRE(one.predictable.size() == 1);
  CHECK(one.predictable[0].index == 512);
  CHECK(one.predictable[0].size == 2.0);
  CHECK(one.merged.size() == 1);

  JumpModel pois;
  PoissonJumps pj;
  pj.intensity = 5.0;
  pj.law = JumpLaw::symmetric_pair(0.5);
  pois.poisson.push_back(pj);
  double mean = 0.0;
  const std::size_t seeds = 500;
  for (std::size_t s = 0; s < seeds; ++s)
    mean += double(gen_jumps(grid, pois, RandomStream::derive(10, "p", s),
                             RandomStream::derive(10, "q", s))
                       .poisson.size());
  mean /= double(seeds);
  // mean 5, sd sqrt(5); 3 standard errors over 500 seeds
  CHECK(std::abs(mean - 5.0) <= 3.0 * std::sqrt(5.0 / double(seeds)));
}

TEST_CASE("gen_dirichlet: component identities") {
  const TimeGrid grid{1.0, 1024};
  ProcessSpec bm_only;
  const DirichletPath pure = gen_dirichlet(bm_only, grid, 11, 0);
  const CadlagPath w = gen_bm(grid, 1.0, RandomStream::derive(11, "bm", 0));
  CHECK(pure.x.values() == w.values());

  ExperimentConfig desk_like;
  ProcessSpec spec;
  spec.bm_sigma = 1.0;
  PoissonJumps pj;
  pj.intensity = 5.0;
  pj.law = JumpLaw::symmetric_pair(0.5);
  spec.jumps.poisson.push_back(pj);
  spec.zero_qv.kind = ZeroQvSpec::Kind::Fbm;
  spec.zero_qv.scale = 0.3;
  const DirichletPath dp = gen_dirichlet(spec, grid, 12, 0);
  const CadlagPath recombined = CadlagPath::combine(1.0, dp.z, 1.0, dp.c);
  for (std::size_t i = 0; i <= grid.n_steps; ++i)
    CHECK(recombined.value_at(i) == doctest::Approx(dp.x.value_at(i)).epsilon(1e-12));
  CHECK(dp.x.jumps().size() == dp.z.jumps().size());
  CHECK(dp.c.jumps().empty());
}

TEST_CASE("gen_dirichlet: the zero-QV stream is independent of the Z streams") {
  const TimeGrid grid{1.0, 1024};
  ProcessSpec with_c;
  with_c.bm_sigma = 1.0;
  PoissonJumps pj;
  pj.intensity = 3.0;
  pj.law = JumpLaw::symmetric_pair(0.5);
  with_c.jumps.poisson.push_back(pj);
  with_c.zero_qv.kind = ZeroQvSpec::Kind::Fbm;
  ProcessSpec without_c = with_c;
  without_c.zero_qv.kind = ZeroQvSpec::Kind::None;
  const DirichletPath a = gen_dirichlet(with_c, grid, 13, 0);
  const DirichletPath b = gen_dirichlet(without_c, grid, 13, 0);
  CHECK(a.z.values() == b.z.values());   // Z untouched by the C component
  CHECK(a.c.sup_norm() > 0.0);
}

TEST_CASE("gen_dirichlet: determinism and member independence") {
  const TimeGrid grid{1.0, 512};
  ProcessSpec spec;
  const DirichletPath a = gen_dirichlet(spec, grid, 14, 3);
  const DirichletPath b = gen_dirichlet(spec, grid, 14, 3);
  const DirichletPath c = gen_dirichlet(spec, grid, 14, 4);
  CHECK(a.x.values() == b.x.values());
  CHECK(a.x.values() != c.x.values());
}

TEST_CASE("non-atomicity proxy: terminal continuous values never collide") {
  const TimeGrid grid{1.0, 64};
  ProcessSpec spec;
  std::set<double> seen;
  for (std::size_t s = 0; s < 10000; ++s) {
    const CadlagPath w = gen_bm(grid, 1.0, RandomStream::derive(15, "collide", s));
    CHECK(seen.insert(w.value_at(grid.n_steps)).second);
  }
}

TEST_CASE("gen_perturbed_family: limits and exact jump-scaling algebra") {
  const TimeGrid grid{1.0, std::size_t{1} << 12};
  ProcessSpec spec;
  spec.bm_sigma = 1.0;
  PoissonJumps pj;
  pj.intensity = 4.0;
  pj.law = JumpLaw::symmetric_pair(0.5);
  spec.jumps.poisson.push_back(pj);
  const DirichletPath dp = gen_dirichlet(spec, grid, 16, 0);

  PerturbationFamily zero;
  zero.kind = PerturbationFamily::Kind::AddBM;
  zero.coefficient = 0.0;
  zero.n_min = zero.n_max = 3;
  const PerturbedFamily fz = gen_perturbed_family(dp, zero, 99);
  REQUIRE(fz.members.size() == 1);
  CHECK(fz.members[0].values() == dp.x.values());

  PerturbationFamily add;
  add.kind = PerturbationFamily::Kind::AddBM;
  add.n_min = 2;
  add.n_max = 8;
  const PerturbedFamily fa = gen_perturbed_family(dp, add, 100);
  const RefiningSequence rs = dyadic_refining(grid, 12, 12);
  for (std::size_t j = 0; j < fa.members.size(); ++j) {
    const CadlagPath diff = CadlagPath::combine(1.0, fa.members[j], -1.0, dp.x);
    const double qv = partition_qv(diff, rs.depths[0], grid.n_steps);
    const double eps2 = fa.eps[j] * fa.eps[j];
    CHECK(qv == doctest::Approx(eps2).epsilon(0.15));
  }

  PerturbationFamily js;
  js.kind = PerturbationFamily::Kind::JumpScale;
  js.coefficient = 0.5;
  js.n_min = js.n_max = 2;
  const PerturbedFamily fj = gen_perturbed_family(dp, js, 101);
  const double delta = fj.eps[0];
  double jump_sq = 0.0;
  for (const Jump& j : dp.x.jumps()) jump_sq += j.size * j.size;
  const CadlagPath diff = CadlagPath::combine(1.0, fj.members[0], -1.0, dp.x);
  const double qv = partition_qv(diff, rs.depths[0], grid.n_steps);
  CHECK(qv == doctest::Approx(delta * delta * jump_sq).epsilon(1e-9));
}

TEST_CASE("compensator_queries: predictable set and atom expectations") {
  JumpModel none;
  CHECK(compensator_queries(none).calA.empty());

  JumpModel fixed;
  FixedTimeJump ft;
  ft.grid_index = 100;
  ft.fire_prob = 0.3;
  ft.law = JumpLaw::symmetric_pair(1.0);
  fixed.fixed_times.push_back(ft);
  const CompensatorView view = compensator_queries(fixed);
  REQUIRE(view.atoms.size() == 1);
  const double e_abs = view.atoms[0].fire_prob *
                       view.atoms[0].law->expect_truncated(
                           [](double x) { return std::abs(x); }, 2.0);
  CHECK(e_abs == doctest::Approx(0.3));

  // Poisson part: second moment of a truncated normal against the closed form.
  JumpModel pois;
  PoissonJumps pj;
  pj.intensity = 5.0;
  DensityLaw law;
  law.kind = DensityLaw::Kind::TruncatedNormal;
  law.sigma = 0.5;
  law.bound = 3.0;
  pj.law = JumpLaw(law);
  pois.poisson.push_back(pj);
  const CompensatorView pv = compensator_queries(pois);
  REQUIRE(pv.poisson_law != nullptr);
  const double quad = pv.poisson_intensity *
                      pv.poisson_law->expect_truncated(
                          [](double x) { return x * x; }, 3.0);
  const double z = 3.0 / 0.5;
  const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
  const double mass = std::erf(z / std::sqrt(2.0));
  const double second_moment = 0.25 * (mass - 2.0 * z * phi) / mass;
  CHECK(quad == doctest::Approx(5.0 * second_moment).epsilon(1e-10));
}

TEST_CASE("spec validation catches bad inputs") {
  const TimeGrid grid{1.0, 64};
  ProcessSpec bad_sigma;
  bad_sigma.bm_sigma = -1.0;
  CHECK_THROWS(bad_sigma.validate(grid));
  ProcessSpec bad_h;
  bad_h.zero_qv.kind = ZeroQvSpec::Kind::Fbm;
  bad_h.zero_qv.hurst = 0.4;
  CHECK_THROWS(bad_h.validate(grid));
  CHECK_THROWS(JumpLaw(DiscreteAtoms{{{0.0, 1.0}}}));
  CHECK_THROWS(JumpLaw(DiscreteAtoms{{{1.0, 0.7}}}));
}
