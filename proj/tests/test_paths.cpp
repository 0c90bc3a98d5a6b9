#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qvlab/path.hpp"
#include "qvlab/rng.hpp"
#include "qvlab/transform.hpp"

using namespace qvlab;

namespace {

CadlagPath flat_with_jumps(const TimeGrid& grid, std::vector<Jump> jumps) {
  return CadlagPath(grid, std::vector<double>(grid.n_steps + 1, 0.0),
                    std::move(jumps));
}

CadlagPath linear_path(const TimeGrid& grid) {
  std::vector<double> cont(grid.n_steps + 1);
  for (std::size_t i = 0; i <= grid.n_steps; ++i) cont[i] = grid.time(i);
  return CadlagPath(grid, std::move(cont), {});
}

CadlagPath random_path(const TimeGrid& grid, std::uint64_t seed) {
  RandomStream rs = RandomStream::derive(seed, "test-path");
  std::vector<double> cont(grid.n_steps + 1, 0.0);
  for (std::size_t i = 1; i <= grid.n_steps; ++i)
    cont[i] = cont[i - 1] + rs.next_normal() * 0.1;
  std::vector<Jump> jumps;
  for (std::size_t i = 1; i <= grid.n_steps; ++i)
    if (rs.next_unit() < 0.05) jumps.push_back({i, rs.next_normal()});
  return CadlagPath(grid, std::move(cont), std::move(jumps));
}

}  // namespace

TEST_CASE("value_at: jump included from its index onward") {
  const TimeGrid grid{1.0, 10};
  const CadlagPath p = flat_with_jumps(grid, {{5, 2.0}});
  CHECK(p.value_at(4) == 0.0);
  CHECK(p.value_at(5) == 2.0);
  CHECK(linear_path(grid).value_at(grid.n_steps) == doctest::Approx(1.0));
}

TEST_CASE("left_limit_at excludes the jump at its own index") {
  const TimeGrid grid{1.0, 10};
  const CadlagPath p = flat_with_jumps(grid, {{5, 2.0}});
  CHECK(p.left_limit_at(5) == 0.0);
  CHECK(p.left_limit_at(6) == 2.0);
  const CadlagPath q = CadlagPath::combine(1.0, linear_path(grid), 1.0,
                                           flat_with_jumps(grid, {{5, -1.0}}));
  CHECK(q.left_limit_at(5) == doctest::Approx(grid.time(5)));
}

TEST_CASE("combine: cancellation, identity, jump merging") {
  const TimeGrid grid{1.0, 16};
  const CadlagPath p = random_path(grid, 1);
  const CadlagPath q = random_path(grid, 2);

  const CadlagPath zero = CadlagPath::combine(1.0, p, -1.0, p);
  CHECK(zero.sup_norm() == 0.0);
  CHECK(zero.jumps().empty());

  const CadlagPath same = CadlagPath::combine(1.0, p, 0.0, q);
  for (std::size_t i = 0; i <= grid.n_steps; ++i)
    CHECK(same.value_at(i) == doctest::Approx(p.value_at(i)));

  const CadlagPath a = flat_with_jumps(grid, {{5, 2.0}});
  const CadlagPath b = flat_with_jumps(grid, {{5, -2.0}});
  const CadlagPath merged = CadlagPath::combine(1.0, a, 1.0, b);
  CHECK(merged.jump_size_at(5) == 0.0);
  CHECK(merged.jumps().empty());
}

TEST_CASE("combine is bilinear at every node") {
  const TimeGrid grid{2.0, 64};
  const CadlagPath p = random_path(grid, 3);
  const CadlagPath q = random_path(grid, 4);
  const CadlagPath c = CadlagPath::combine(2.5, p, -0.75, q);
  for (std::size_t i = 0; i <= grid.n_steps; ++i) {
    CHECK(c.value_at(i) ==
          doctest::Approx(2.5 * p.value_at(i) - 0.75 * q.value_at(i))
              .epsilon(1e-12));
    if (i >= 1)
      CHECK(c.value_at(i) - c.left_limit_at(i) ==
            doctest::Approx(c.jump_size_at(i)).epsilon(1e-12));
  }
}

TEST_CASE("sup_norm covers values and left limits") {
  const TimeGrid grid{1.0, 10};
  CHECK(CadlagPath::zero(grid).sup_norm() == 0.0);
  const CadlagPath p = flat_with_jumps(grid, {{3, 1.0}, {7, -4.0}});
  CHECK(p.sup_norm() == doctest::Approx(3.0));  // values run 0, 1, -3
  CHECK(linear_path(grid).sup_norm() == doctest::Approx(1.0));
  const CadlagPath q = random_path(grid, 5);
  const CadlagPath r = random_path(grid, 6);
  CHECK(CadlagPath::combine(1.0, q, 1.0, r).sup_norm() <=
        q.sup_norm() + r.sup_norm() + 1e-12);
}

TEST_CASE("transform: identity, square jump, abs jump cancellation") {
  const TimeGrid grid{1.0, 10};
  const CadlagPath p = random_path(grid, 7);
  const CadlagPath id = transform(p, identity_transform());
  for (std::size_t i = 0; i <= grid.n_steps; ++i) {
    CHECK(id.value_at(i) == doctest::Approx(p.value_at(i)));
    if (i >= 1) CHECK(id.left_limit_at(i) == doctest::Approx(p.left_limit_at(i)));
  }

  const CadlagPath j = flat_with_jumps(grid, {{5, 2.0}});
  const CadlagPath sq = transform(j, square_transform());
  CHECK(sq.jump_size_at(5) == doctest::Approx(4.0));

  // values 0, -1, 1: |x| transform keeps the jump at 3 but drops the one at 6
  const CadlagPath two = flat_with_jumps(grid, {{3, -1.0}, {6, 2.0}});
  const CadlagPath ab = transform(two, abs_transform());
  CHECK(ab.value_at(2) == 0.0);
  CHECK(ab.value_at(3) == doctest::Approx(1.0));
  CHECK(ab.value_at(6) == doctest::Approx(1.0));
  CHECK(ab.jump_size_at(3) == doctest::Approx(1.0));
  CHECK(ab.jump_size_at(6) == 0.0);
}

TEST_CASE("transform composes pointwise on values") {
  const TimeGrid grid{1.0, 32};
  const CadlagPath p = random_path(grid, 8);
  const CadlagPath inner = transform(p, abs_transform());
  const CadlagPath composed = transform(inner, square_transform());
  for (std::size_t i = 0; i <= grid.n_steps; ++i) {
    const double v = p.value_at(i);
    CHECK(composed.value_at(i) ==
          doctest::Approx(std::abs(v) * std::abs(v)).epsilon(1e-12));
  }
}

TEST_CASE("from_values round-trips the value array and jump list") {
  const TimeGrid grid{1.0, 64};
  const CadlagPath p = random_path(grid, 9);
  const CadlagPath rebuilt = CadlagPath::from_values(grid, p.values(), p.jumps());
  for (std::size_t i = 0; i <= grid.n_steps; ++i) {
    CHECK(rebuilt.value_at(i) == doctest::Approx(p.value_at(i)).epsilon(1e-12));
    if (i >= 1)
      CHECK(rebuilt.left_limit_at(i) ==
            doctest::Approx(p.left_limit_at(i)).epsilon(1e-12));
  }
}

TEST_CASE("construction validation") {
  CHECK_THROWS(TimeGrid(0.0, 8));
  CHECK_THROWS(TimeGrid(1.0, 1));
  const TimeGrid grid{1.0, 8};
  CHECK_THROWS(CadlagPath(grid, std::vector<double>(5, 0.0), {}));  // wrong size
  CHECK_THROWS(flat_with_jumps(grid, {{0, 1.0}}));                  // index 0
  CHECK_THROWS(flat_with_jumps(grid, {{5, 1.0}, {5, 1.0}}));        // duplicate
  CHECK_THROWS(flat_with_jumps(grid, {{5, 0.0}}));                  // zero size
}
