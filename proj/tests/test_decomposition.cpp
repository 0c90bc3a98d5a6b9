#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qvlab/decomposition.hpp"
#include "qvlab/experiments.hpp"
#include "qvlab/generators.hpp"
#include "qvlab/quadvar.hpp"
#include "qvlab/rng.hpp"

using namespace qvlab;

namespace {

ProcessSpec bm_cp_spec(double intensity = 5.0) {
  ProcessSpec spec;
  spec.bm_sigma = 1.0;
  if (intensity > 0.0) {
    PoissonJumps pj;
    pj.intensity = intensity;
    pj.law = JumpLaw::symmetric_pair(0.5);
    spec.jumps.poisson.push_back(pj);
  }
  return spec;
}

ProcessSpec desk_spec(const TimeGrid& grid) {
  ProcessSpec spec = bm_cp_spec();
  spec.zero_qv.kind = ZeroQvSpec::Kind::Fbm;
  spec.zero_qv.scale = 0.3;
  FixedTimeJump ft;
  ft.grid_index = grid.n_steps / 2;
  ft.fire_prob = 0.5;
  ft.law = JumpLaw::symmetric_pair(0.3);
  spec.jumps.fixed_times.push_back(ft);
  return spec;
}

DecompositionOptions depth12_options() {
  DecompositionOptions opt;
  opt.k_min = 4;
  opt.k_max = 12;
  return opt;
}

}  // namespace

TEST_CASE("follmer_decompose: identity transform is exact") {
  const TimeGrid grid{1.0, std::size_t{1} << 10};
  const RefiningSequence rs = dyadic_refining(grid, 4, 10);
  const DirichletPath dp = gen_dirichlet(desk_spec(grid), grid, 30, 0);
  const FollmerReport fr = follmer_decompose(identity_transform(), dp.x, rs);
  CHECK(fr.jump_compensation.sup_norm() <= 1e-12);
  CHECK(fr.residual_sup <= 1e-9 * (1.0 + dp.x.sup_norm()));
}

TEST_CASE("follmer_decompose: square transform on jump diffusion") {
  const TimeGrid grid{1.0, std::size_t{1} << 14};
  const RefiningSequence rs = dyadic_refining(grid, 6, 14);
  std::vector<double> rel;
  for (std::size_t s = 0; s < 20; ++s) {
    const DirichletPath dp = gen_dirichlet(bm_cp_spec(), grid, 31, s);
    const FollmerReport fr = follmer_decompose(square_transform(), dp.x, rs);
    const double scale = transform(dp.x, square_transform()).sup_norm();
    rel.push_back(fr.residual_sup / std::max(scale, 1e-12));
  }
  CHECK(median(rel) <= 5e-3);
}

TEST_CASE("follmer_decompose: pure-jump paths are exact") {
  const TimeGrid grid{1.0, std::size_t{1} << 10};
  const RefiningSequence rs = dyadic_refining(grid, 4, 10);
  ProcessSpec spec = bm_cp_spec(3.0);
  spec.bm_sigma = 0.0;
  for (std::size_t s = 0; s < 10; ++s) {
    const DirichletPath dp = gen_dirichlet(spec, grid, 32, s);
    const FollmerReport fr = follmer_decompose(square_transform(), dp.x, rs);
    const double scale =
        std::max(transform(dp.x, square_transform()).sup_norm(), 1.0);
    CHECK(fr.residual_sup <= 1e-9 * scale);
  }
}

TEST_CASE("lowther_qv_identity: identity transform gives both sides = [X]") {
  const TimeGrid grid{1.0, std::size_t{1} << 12};
  const RefiningSequence rs = dyadic_refining(grid, 6, 12);
  const DirichletPath dp = gen_dirichlet(bm_cp_spec(), grid, 33, 0);
  const LowtherReport lr = lowther_qv_identity(identity_transform(), dp.x, rs);
  const double qv = weak_qv(dp.x, rs).estimate;
  CHECK(lr.lhs == doctest::Approx(qv).epsilon(1e-9));
  CHECK(lr.rhs == doctest::Approx(qv).epsilon(1e-6));
}

TEST_CASE("lowther_qv_identity: abs and square transforms close the gap") {
  const TimeGrid grid{1.0, std::size_t{1} << 14};
  const RefiningSequence rs = dyadic_refining(grid, 6, 14);
  std::vector<double> gap_abs, gap_sq;
  for (std::size_t s = 0; s < 20; ++s) {
    const DirichletPath dp = gen_dirichlet(bm_cp_spec(), grid, 34, s);
    gap_abs.push_back(lowther_qv_identity(abs_transform(), dp.x, rs).gap_relative);
    gap_sq.push_back(
        lowther_qv_identity(square_transform(), dp.x, rs).gap_relative);
  }
  CHECK(median(gap_abs) <= 0.03);
  CHECK(median(gap_sq) <= 0.03);
}

TEST_CASE("ya_decompose: identity transform leaves Gamma = C") {
  const TimeGrid grid{1.0, std::size_t{1} << 12};
  const DirichletPath dp = gen_dirichlet(desk_spec(grid), grid, 35, 0);
  const DecompositionReport dr = ya_decompose(identity_transform(), dp, 0.4, depth12_options());
  for (std::size_t i = 0; i <= grid.n_steps; i += 16)
    CHECK(dr.gamma.value_at(i) ==
          doctest::Approx(dp.c.value_at(i)).epsilon(1e-12));
  CHECK(dr.gamma.jumps().empty());
}

TEST_CASE("ya_decompose: continuous paths route everything through dZ and C") {
  const TimeGrid grid{1.0, std::size_t{1} << 14};
  ProcessSpec spec;
  spec.bm_sigma = 1.0;
  spec.zero_qv.kind = ZeroQvSpec::Kind::Fbm;
  spec.zero_qv.scale = 0.3;
  const RefiningSequence rs = dyadic_refining(grid, 6, 14);
  std::vector<double> ratios;
  for (std::size_t s = 0; s < 10; ++s) {
    const DirichletPath dp = gen_dirichlet(spec, grid, 36, s);
    const DecompositionReport dr = ya_decompose(square_transform(), dp, 1.0);
    CHECK(dr.big_jump_sum.sup_norm() == 0.0);
    CHECK(dr.small_jump_compensated.sup_norm() == 0.0);
    CHECK(dr.predictable_small_sum.sup_norm() == 0.0);
    ratios.push_back(dr.gamma_qv.estimate /
                     std::max(dr.fx_qv.estimate, 1e-15));
  }
  CHECK(median(ratios) <= 0.05);
}

TEST_CASE("ya_decompose: threshold above every jump empties the big-jump term") {
  const TimeGrid grid{1.0, std::size_t{1} << 12};
  ProcessSpec spec = bm_cp_spec();  // jumps of size 0.5 only, no fixed times
  const DirichletPath dp = gen_dirichlet(spec, grid, 37, 0);
  REQUIRE(!dp.x.jumps().empty());
  const DecompositionReport dr = ya_decompose(square_transform(), dp, 10.0, depth12_options());
  CHECK(dr.big_jump_sum.sup_norm() == 0.0);
  CHECK(dr.small_jump_compensated.jumps().size() == dp.jumps.poisson.size());
}

TEST_CASE("ya_decompose: Gamma is continuous and the sum is exact") {
  const TimeGrid grid{1.0, std::size_t{1} << 12};
  const DirichletPath dp = gen_dirichlet(desk_spec(grid), grid, 38, 1);
  for (const auto& f : {square_transform(), abs_transform()}) {
    for (double a : {0.4, 1.0}) {
      const DecompositionReport dr = ya_decompose(f, dp, a, depth12_options());
      const double scale = std::max(transform(dp.x, f).sup_norm(), 1e-12);
      CHECK(dr.jump_cancellation <= 1e-9 * scale);
      CHECK(dr.residual_sup <= 1e-9 * scale);
    }
  }
}

TEST_CASE("ya_decompose: the split is independent of the threshold") {
  const TimeGrid grid{1.0, std::size_t{1} << 12};
  const DirichletPath dp = gen_dirichlet(desk_spec(grid), grid, 39, 2);
  const TransformSpec f = square_transform();
  const DecompositionReport d1 = ya_decompose(f, dp, 0.35, depth12_options());
  const DecompositionReport d2 = ya_decompose(f, dp, 0.6, depth12_options());
  const CadlagPath fx = transform(dp.x, f);
  const double scale = std::max(fx.sup_norm(), 1e-12);
  for (std::size_t i = 0; i <= grid.n_steps; i += 16) {
    CHECK(std::abs(d1.ya.value_at(i) + d1.gamma.value_at(i) - fx.value_at(i)) <=
          1e-9 * scale);
    CHECK(std::abs(d2.ya.value_at(i) + d2.gamma.value_at(i) - fx.value_at(i)) <=
          1e-9 * scale);
  }
  // Both Y^a carry exactly the jumps of f(X), so their difference is
  // jump-free; the threshold only reroutes jumps between the big-jump term
  // and the compensated small-jump terms.
  const CadlagPath ydiff = CadlagPath::combine(1.0, d1.ya, -1.0, d2.ya);
  for (const Jump& j : dp.x.jumps())
    CHECK(std::abs(ydiff.jump_size_at(j.index)) <= 1e-12 * scale);
  const CadlagPath big_diff =
      CadlagPath::combine(1.0, d1.big_jump_sum, -1.0, d2.big_jump_sum);
  for (const Jump& j : dp.x.jumps()) {
    const double mag = std::abs(j.size);
    const double expect =
        mag > 0.35 && mag <= 0.6
            ? transform(dp.x, f).jump_size_at(j.index) -
                  j.size * 2.0 * dp.x.left_limit_at(j.index)
            : 0.0;
    CHECK(big_diff.jump_size_at(j.index) ==
          doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("predictable_summability: exact finite sums") {
  JumpModel none;
  CHECK(predictable_summability(none, 1.0) == 0.0);

  JumpModel many;
  for (std::size_t k = 1; k <= 10; ++k) {
    FixedTimeJump ft;
    ft.grid_index = 10 * k;
    ft.fire_prob = 1.0;
    ft.law = JumpLaw::symmetric_pair(1.0);
    many.fixed_times.push_back(ft);
  }
  CHECK(predictable_summability(many, 2.0) == doctest::Approx(10.0));

  JumpModel beyond;
  FixedTimeJump ft;
  ft.grid_index = 5;
  ft.fire_prob = 0.3;
  ft.law = JumpLaw::point_mass(1.5);
  beyond.fixed_times.push_back(ft);
  CHECK(predictable_summability(beyond, 1.0) == 0.0);
}

TEST_CASE("rewrite_consistency: no fixed times leaves no gap") {
  const TimeGrid grid{1.0, std::size_t{1} << 12};
  const DirichletPath dp = gen_dirichlet(bm_cp_spec(), grid, 40, 0);
  CHECK(rewrite_consistency(square_transform(), dp, 0.4).sup_gap <= 1e-12);
}

TEST_CASE("rewrite_consistency: discrete laws are exact") {
  const TimeGrid grid{1.0, std::size_t{1} << 12};
  const DirichletPath dp = gen_dirichlet(desk_spec(grid), grid, 41, 0);
  CHECK(rewrite_consistency(square_transform(), dp, 0.4).sup_gap <= 1e-9);
  CHECK(rewrite_consistency(abs_transform(), dp, 1.0).sup_gap <= 1e-9);
}

TEST_CASE("rewrite_consistency: density-law gap is quadrature-limited") {
  const TimeGrid grid{1.0, std::size_t{1} << 12};
  ProcessSpec spec = bm_cp_spec();
  FixedTimeJump ft;
  ft.grid_index = grid.n_steps / 2;
  ft.fire_prob = 0.5;
  DensityLaw law;
  law.kind = DensityLaw::Kind::TruncatedNormal;
  law.sigma = 0.3;
  law.bound = 1.0;
  ft.law = JumpLaw(law);
  spec.jumps.fixed_times.push_back(ft);
  const DirichletPath dp = gen_dirichlet(spec, grid, 42, 0);

  DecompositionOptions coarse, fine;
  coarse.quad_panels = 32;
  fine.quad_panels = 128;  // 4x panels -> midpoint error shrinks ~16x
  const double g_coarse =
      rewrite_consistency(square_transform(), dp, 0.4, coarse).sup_gap;
  const double g_fine =
      rewrite_consistency(square_transform(), dp, 0.4, fine).sup_gap;
  CHECK(g_coarse <= 1e-6);
  CHECK(g_fine <= g_coarse / 8.0);  // allow slack around the ideal 16x
}
