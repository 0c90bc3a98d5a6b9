#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "qvlab/config.hpp"
#include "qvlab/csv.hpp"
#include "qvlab/generators.hpp"
#include "qvlab/pathio.hpp"
#include "qvlab/rng.hpp"

using namespace qvlab;

TEST_CASE("parse_config_json: full document round-trips through canonical form") {
  const std::string text = R"({
    "grid": {"horizon": 2.0, "n_steps": 4096},
    "process": {
      "bm_sigma": 0.9,
      "drift": {"knots": [[0.0, 0.0], [1.0, 0.5]]},
      "jumps": {
        "poisson": [{"intensity": 3.0, "law": {"kind": "symmetric_pair", "value": 0.5}}],
        "fixed_times": [{"grid_index": 2048, "fire_prob": 0.5,
                         "law": {"kind": "truncated_normal", "sigma": 0.3, "bound": 1.0}}]
      },
      "zero_qv": {"kind": "fbm", "hurst": 0.75, "scale": 0.25}
    },
    "transform": "abs",
    "family": {"kind": "add_zero_qv", "coefficient": 0.5, "n_min": 2, "n_max": 5},
    "k_min": 4, "k_max": 10,
    "schemes": [{"kind": "dyadic", "depth": 8},
                {"kind": "hitting_time", "epsilon": 0.05, "cap": 0.01}],
    "seeds": 12, "base_seed": 777, "threshold_a": 0.4,
    "tolerances": {"lowther_gap_rel": 0.05},
    "output_dir": "results", "jobs": 2,
    "decomposition": {"cont_qv_mode": "generator_exact",
                      "generator_cont_qv_rate": 0.81, "quad_panels": 32}
  })";
  const ExperimentConfig cfg = parse_config_json(text);
  CHECK(cfg.grid.horizon == 2.0);
  CHECK(cfg.grid.n_steps == 4096);
  CHECK(cfg.process.bm_sigma == 0.9);
  CHECK(cfg.process.jumps.poisson.size() == 1);
  CHECK(cfg.process.jumps.fixed_times.size() == 1);
  CHECK_FALSE(cfg.process.jumps.fixed_times[0].law.is_discrete());
  CHECK(cfg.transform == "abs");
  CHECK(cfg.family.kind == PerturbationFamily::Kind::AddZeroQV);
  CHECK(cfg.schemes.size() == 2);
  CHECK(cfg.seeds == 12);
  CHECK(cfg.tolerances.lowther_gap_rel == 0.05);
  CHECK(cfg.tolerances.gamma_qv_fraction == 0.05);  // untouched default
  CHECK(cfg.decomposition.cont_qv_mode ==
        DecompositionOptions::ContQvMode::GeneratorExact);

  // canonical form is a fixed point of parse -> dump
  const std::string canon = canonical_config_json(cfg);
  const ExperimentConfig reparsed = parse_config_json(canon);
  CHECK(canonical_config_json(reparsed) == canon);
}

TEST_CASE("parse_config_json rejects unknown keys at every level") {
  CHECK_THROWS(parse_config_json(R"({"grib": {}})"));
  CHECK_THROWS(parse_config_json(R"({"grid": {"horizon": 1.0, "steps": 64}})"));
  CHECK_THROWS(parse_config_json(R"({"process": {"volatility": 1.0}})"));
  CHECK_THROWS(parse_config_json(
      R"({"process": {"jumps": {"poisson": [{"rate": 1.0}]}}})"));
  CHECK_THROWS(parse_config_json(R"({"tolerances": {"slope": 1.0}})"));
  CHECK_THROWS(parse_config_json(R"({"decomposition": {"mode": "x"}})"));
}

TEST_CASE("parse_config_json rejects malformed or invalid documents") {
  CHECK_THROWS(parse_config_json("{not json"));
  CHECK_THROWS(parse_config_json(R"({"seeds": 0})"));
  CHECK_THROWS(parse_config_json(R"({"k_min": 9, "k_max": 3})"));
  CHECK_THROWS(parse_config_json(R"({"transform": 17})"));
  CHECK_THROWS(parse_config_json(
      R"({"process": {"zero_qv": {"kind": "white-noise"}}})"));
  CHECK_THROWS(parse_config_json(
      R"({"schemes": [{"kind": "dyadic", "epsilon": 0.1}]})"));
}

TEST_CASE("desk scenario validates and hashes stably") {
  const ExperimentConfig cfg = desk_scenario_config();
  CHECK_NOTHROW(cfg.validate());
  CHECK(canonical_config_json(cfg) == canonical_config_json(desk_scenario_config()));
}

TEST_CASE("path serialization round-trips bit-exactly") {
  const TimeGrid grid{1.0, 512};
  ProcessSpec spec;
  spec.bm_sigma = 1.0;
  PoissonJumps pj;
  pj.intensity = 6.0;
  pj.law = JumpLaw::symmetric_pair(0.5);
  spec.jumps.poisson.push_back(pj);
  const DirichletPath dp = gen_dirichlet(spec, grid, 60, 0);
  const CadlagPath back = parse_path(serialize_path(dp.x));
  CHECK(back.grid() == dp.x.grid());
  CHECK(back.cont() == dp.x.cont());
  REQUIRE(back.jumps().size() == dp.x.jumps().size());
  for (std::size_t k = 0; k < back.jumps().size(); ++k) {
    CHECK(back.jumps()[k].index == dp.x.jumps()[k].index);
    CHECK(back.jumps()[k].size == dp.x.jumps()[k].size);
  }
  CHECK_THROWS(parse_path("not,a,path\n"));
}

TEST_CASE("CSV writer enforces the dialect") {
  CsvWriter csv({"a", "b"});
  csv.add_row({"1", "2"});
  CHECK(csv.str() == "a,b\n1,2\n");
  CHECK_THROWS(csv.add_row({"only-one"}));
  CHECK(CsvWriter::format(0.1) == "0.10000000000000001");
  CHECK(CsvWriter::format(1.0) == "1");
}
