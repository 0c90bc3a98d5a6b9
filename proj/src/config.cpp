#include "qvlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qvlab {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      fail(path + "." + item.key(), "unknown key");
}

double get_double(const json& obj, const std::string& path,
                  const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
  return obj[key].get<double>();
}

std::int64_t get_int(const json& obj, const std::string& path,
                     const std::string& key, std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) fail(path + "." + key, "expected an integer");
  return obj[key].get<std::int64_t>();
}

std::string get_string(const json& obj, const std::string& path,
                       const std::string& key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) fail(path + "." + key, "expected a string");
  return obj[key].get<std::string>();
}

JumpLaw parse_law(const json& obj, const std::string& path) {
  const std::string kind = get_string(obj, path, "kind", "");
  if (kind == "atoms") {
    reject_unknown(obj, path, {"kind", "atoms"});
    if (!obj.contains("atoms") || !obj["atoms"].is_array())
      fail(path + ".atoms", "expected an array of [value, prob] pairs");
    DiscreteAtoms atoms;
    for (const auto& pair : obj["atoms"]) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
          !pair[1].is_number())
        fail(path + ".atoms", "each entry must be [value, prob]");
      atoms.atoms.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    return JumpLaw(atoms);
  }
  if (kind == "point_mass") {
    reject_unknown(obj, path, {"kind", "value"});
    return JumpLaw::point_mass(get_double(obj, path, "value", 1.0));
  }
  if (kind == "symmetric_pair") {
    reject_unknown(obj, path, {"kind", "value"});
    return JumpLaw::symmetric_pair(get_double(obj, path, "value", 1.0));
  }
  if (kind == "truncated_normal") {
    reject_unknown(obj, path, {"kind", "sigma", "bound"});
    DensityLaw law;
    law.kind = DensityLaw::Kind::TruncatedNormal;
    law.sigma = get_double(obj, path, "sigma", 1.0);
    law.bound = get_double(obj, path, "bound", 3.0);
    return JumpLaw(law);
  }
  if (kind == "uniform") {
    reject_unknown(obj, path, {"kind", "lo", "hi"});
    DensityLaw law;
    law.kind = DensityLaw::Kind::Uniform;
    law.lo = get_double(obj, path, "lo", -1.0);
    law.hi = get_double(obj, path, "hi", 1.0);
    return JumpLaw(law);
  }
  fail(path + ".kind", "unknown law kind '" + kind + "'");
}

json law_to_json(const JumpLaw& law) {
  json out;
  if (const DiscreteAtoms* atoms = law.discrete()) {
    out["kind"] = "atoms";
    json list = json::array();
    for (const auto& [v, p] : atoms->atoms) list.push_back(json::array({v, p}));
    out["atoms"] = list;
    return out;
  }
  const DensityLaw* d = law.density();
  if (d->kind == DensityLaw::Kind::TruncatedNormal) {
    out["kind"] = "truncated_normal";
    out["sigma"] = d->sigma;
    out["bound"] = d->bound;
  } else {
    out["kind"] = "uniform";
    out["lo"] = d->lo;
    out["hi"] = d->hi;
  }
  return out;
}

PartitionScheme parse_scheme(const json& obj, const std::string& path) {
  PartitionScheme s;
  const std::string kind = get_string(obj, path, "kind", "dyadic");
  if (kind == "dyadic" || kind == "shifted_dyadic") {
    reject_unknown(obj, path, {"kind", "depth"});
    s.kind = kind == "dyadic" ? PartitionScheme::Kind::Dyadic
                              : PartitionScheme::Kind::ShiftedDyadic;
    s.depth = static_cast<int>(get_int(obj, path, "depth", 10));
  } else if (kind == "hitting_time") {
    reject_unknown(obj, path, {"kind", "epsilon", "cap"});
    s.kind = PartitionScheme::Kind::HittingTime;
    s.epsilon = get_double(obj, path, "epsilon", 0.05);
    s.cap = get_double(obj, path, "cap", 0.01);
  } else if (kind == "random_mesh") {
    reject_unknown(obj, path, {"kind", "mean_gap", "seed"});
    s.kind = PartitionScheme::Kind::RandomMesh;
    s.mean_gap = get_double(obj, path, "mean_gap", 1e-3);
    s.seed = static_cast<std::uint64_t>(get_int(obj, path, "seed", 1));
  } else {
    fail(path + ".kind", "unknown scheme kind '" + kind + "'");
  }
  return s;
}

json scheme_to_json(const PartitionScheme& s) {
  json out;
  switch (s.kind) {
    case PartitionScheme::Kind::Dyadic:
      out["kind"] = "dyadic";
      out["depth"] = s.depth;
      break;
    case PartitionScheme::Kind::ShiftedDyadic:
      out["kind"] = "shifted_dyadic";
      out["depth"] = s.depth;
      break;
    case PartitionScheme::Kind::HittingTime:
      out["kind"] = "hitting_time";
      out["epsilon"] = s.epsilon;
      out["cap"] = s.cap;
      break;
    case PartitionScheme::Kind::RandomMesh:
      out["kind"] = "random_mesh";
      out["mean_gap"] = s.mean_gap;
      out["seed"] = s.seed;
      break;
  }
  return out;
}

ProcessSpec parse_process(const json& obj, const std::string& path) {
  reject_unknown(obj, path,
                 {"bm_sigma", "drift", "jumps", "zero_qv", "independent_streams"});
  ProcessSpec spec;
  spec.bm_sigma = get_double(obj, path, "bm_sigma", spec.bm_sigma);
  if (obj.contains("independent_streams")) {
    if (!obj["independent_streams"].is_boolean())
      fail(path + ".independent_streams", "expected a boolean");
    spec.independent_streams = obj["independent_streams"].get<bool>();
  }
  if (obj.contains("drift")) {
    const json& d = obj["drift"];
    reject_unknown(d, path + ".drift", {"knots"});
    if (d.contains("knots")) {
      if (!d["knots"].is_array()) fail(path + ".drift.knots", "expected an array");
      for (const auto& pair : d["knots"]) {
        if (!pair.is_array() || pair.size() != 2)
          fail(path + ".drift.knots", "each entry must be [time, value]");
        spec.drift.knots.emplace_back(pair[0].get<double>(),
                                      pair[1].get<double>());
      }
    }
  }
  if (obj.contains("jumps")) {
    const json& j = obj["jumps"];
    reject_unknown(j, path + ".jumps", {"poisson", "fixed_times"});
    if (j.contains("poisson")) {
      if (!j["poisson"].is_array()) fail(path + ".jumps.poisson", "expected an array");
      for (std::size_t i = 0; i < j["poisson"].size(); ++i) {
        const json& p = j["poisson"][i];
        const std::string pp = path + ".jumps.poisson[" + std::to_string(i) + "]";
        reject_unknown(p, pp, {"intensity", "law"});
        PoissonJumps pj;
        pj.intensity = get_double(p, pp, "intensity", 0.0);
        if (p.contains("law")) pj.law = parse_law(p["law"], pp + ".law");
        spec.jumps.poisson.push_back(pj);
      }
    }
    if (j.contains("fixed_times")) {
      if (!j["fixed_times"].is_array())
        fail(path + ".jumps.fixed_times", "expected an array");
      for (std::size_t i = 0; i < j["fixed_times"].size(); ++i) {
        const json& ft = j["fixed_times"][i];
        const std::string fp =
            path + ".jumps.fixed_times[" + std::to_string(i) + "]";
        reject_unknown(ft, fp, {"grid_index", "fire_prob", "law"});
        FixedTimeJump entry;
        entry.grid_index =
            static_cast<std::size_t>(get_int(ft, fp, "grid_index", 0));
        entry.fire_prob = get_double(ft, fp, "fire_prob", 1.0);
        if (ft.contains("law")) entry.law = parse_law(ft["law"], fp + ".law");
        spec.jumps.fixed_times.push_back(entry);
      }
    }
  }
  if (obj.contains("zero_qv")) {
    const json& z = obj["zero_qv"];
    reject_unknown(z, path + ".zero_qv", {"kind", "hurst", "scale"});
    const std::string kind = get_string(z, path + ".zero_qv", "kind", "none");
    if (kind == "none")
      spec.zero_qv.kind = ZeroQvSpec::Kind::None;
    else if (kind == "fbm")
      spec.zero_qv.kind = ZeroQvSpec::Kind::Fbm;
    else if (kind == "deterministic_hoelder")
      spec.zero_qv.kind = ZeroQvSpec::Kind::DeterministicHoelder;
    else
      fail(path + ".zero_qv.kind", "unknown kind '" + kind + "'");
    spec.zero_qv.hurst = get_double(z, path + ".zero_qv", "hurst", 0.75);
    spec.zero_qv.scale = get_double(z, path + ".zero_qv", "scale", 1.0);
  }
  return spec;
}

json process_to_json(const ProcessSpec& spec) {
  json out;
  out["bm_sigma"] = spec.bm_sigma;
  json knots = json::array();
  for (const auto& [t, v] : spec.drift.knots) knots.push_back(json::array({t, v}));
  out["drift"] = json{{"knots", knots}};
  json poisson = json::array();
  for (const auto& p : spec.jumps.poisson)
    poisson.push_back(json{{"intensity", p.intensity}, {"law", law_to_json(p.law)}});
  json fixed = json::array();
  for (const auto& ft : spec.jumps.fixed_times)
    fixed.push_back(json{{"grid_index", ft.grid_index},
                         {"fire_prob", ft.fire_prob},
                         {"law", law_to_json(ft.law)}});
  out["jumps"] = json{{"poisson", poisson}, {"fixed_times", fixed}};
  const char* zk = spec.zero_qv.kind == ZeroQvSpec::Kind::None ? "none"
                   : spec.zero_qv.kind == ZeroQvSpec::Kind::Fbm
                       ? "fbm"
                       : "deterministic_hoelder";
  out["zero_qv"] = json{
      {"kind", zk}, {"hurst", spec.zero_qv.hurst}, {"scale", spec.zero_qv.scale}};
  out["independent_streams"] = spec.independent_streams;
  return out;
}

PerturbationFamily parse_family(const json& obj, const std::string& path) {
  reject_unknown(obj, path, {"kind", "coefficient", "hurst", "n_min", "n_max"});
  PerturbationFamily fam;
  const std::string kind = get_string(obj, path, "kind", "add_bm");
  if (kind == "add_bm")
    fam.kind = PerturbationFamily::Kind::AddBM;
  else if (kind == "add_zero_qv")
    fam.kind = PerturbationFamily::Kind::AddZeroQV;
  else if (kind == "jump_scale")
    fam.kind = PerturbationFamily::Kind::JumpScale;
  else
    fail(path + ".kind", "unknown family kind '" + kind + "'");
  fam.coefficient = get_double(obj, path, "coefficient", fam.coefficient);
  fam.hurst = get_double(obj, path, "hurst", fam.hurst);
  fam.n_min = static_cast<int>(get_int(obj, path, "n_min", fam.n_min));
  fam.n_max = static_cast<int>(get_int(obj, path, "n_max", fam.n_max));
  if (fam.n_max < fam.n_min) fail(path, "n_max < n_min");
  return fam;
}

json family_to_json(const PerturbationFamily& fam) {
  const char* kind = fam.kind == PerturbationFamily::Kind::AddBM ? "add_bm"
                     : fam.kind == PerturbationFamily::Kind::AddZeroQV
                         ? "add_zero_qv"
                         : "jump_scale";
  return json{{"kind", kind},
              {"coefficient", fam.coefficient},
              {"hurst", fam.hurst},
              {"n_min", fam.n_min},
              {"n_max", fam.n_max}};
}

ToleranceSet parse_tolerances(const json& obj, const std::string& path) {
  reject_unknown(obj, path,
                 {"stability_bound_factor", "stability_slope",
                  "stability_slope_window", "gamma_qv_fraction",
                  "jump_cancellation_rel", "rewrite_gap_discrete",
                  "rewrite_gap_density", "follmer_residual_rel",
                  "lowther_gap_rel"});
  ToleranceSet t;
  t.stability_bound_factor =
      get_double(obj, path, "stability_bound_factor", t.stability_bound_factor);
  t.stability_slope = get_double(obj, path, "stability_slope", t.stability_slope);
  t.stability_slope_window =
      get_double(obj, path, "stability_slope_window", t.stability_slope_window);
  t.gamma_qv_fraction =
      get_double(obj, path, "gamma_qv_fraction", t.gamma_qv_fraction);
  t.jump_cancellation_rel =
      get_double(obj, path, "jump_cancellation_rel", t.jump_cancellation_rel);
  t.rewrite_gap_discrete =
      get_double(obj, path, "rewrite_gap_discrete", t.rewrite_gap_discrete);
  t.rewrite_gap_density =
      get_double(obj, path, "rewrite_gap_density", t.rewrite_gap_density);
  t.follmer_residual_rel =
      get_double(obj, path, "follmer_residual_rel", t.follmer_residual_rel);
  t.lowther_gap_rel = get_double(obj, path, "lowther_gap_rel", t.lowther_gap_rel);
  return t;
}

json tolerances_to_json(const ToleranceSet& t) {
  return json{{"stability_bound_factor", t.stability_bound_factor},
              {"stability_slope", t.stability_slope},
              {"stability_slope_window", t.stability_slope_window},
              {"gamma_qv_fraction", t.gamma_qv_fraction},
              {"jump_cancellation_rel", t.jump_cancellation_rel},
              {"rewrite_gap_discrete", t.rewrite_gap_discrete},
              {"rewrite_gap_density", t.rewrite_gap_density},
              {"follmer_residual_rel", t.follmer_residual_rel},
              {"lowther_gap_rel", t.lowther_gap_rel}};
}

DecompositionOptions parse_decomposition(const json& obj,
                                         const std::string& path) {
  reject_unknown(obj, path,
                 {"cont_qv_mode", "generator_cont_qv_rate", "quad_panels"});
  DecompositionOptions opt;
  const std::string mode =
      get_string(obj, path, "cont_qv_mode", "partition_minus_jumps");
  if (mode == "partition_minus_jumps")
    opt.cont_qv_mode = DecompositionOptions::ContQvMode::PartitionMinusJumps;
  else if (mode == "generator_exact")
    opt.cont_qv_mode = DecompositionOptions::ContQvMode::GeneratorExact;
  else
    fail(path + ".cont_qv_mode", "unknown mode '" + mode + "'");
  opt.generator_cont_qv_rate =
      get_double(obj, path, "generator_cont_qv_rate", opt.generator_cont_qv_rate);
  opt.quad_panels =
      static_cast<std::size_t>(get_int(obj, path, "quad_panels",
                                       static_cast<std::int64_t>(opt.quad_panels)));
  return opt;
}

json decomposition_to_json(const DecompositionOptions& opt) {
  const char* mode =
      opt.cont_qv_mode == DecompositionOptions::ContQvMode::PartitionMinusJumps
          ? "partition_minus_jumps"
          : "generator_exact";
  return json{{"cont_qv_mode", mode},
              {"generator_cont_qv_rate", opt.generator_cont_qv_rate},
              {"quad_panels", opt.quad_panels}};
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") +
                                e.what());
  }
  reject_unknown(doc, "$",
                 {"grid", "process", "transform", "family", "k_min", "k_max",
                  "schemes", "seeds", "base_seed", "threshold_a", "tolerances",
                  "output_dir", "jobs", "decomposition"});
  ExperimentConfig cfg;
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    reject_unknown(g, "$.grid", {"horizon", "n_steps"});
    cfg.grid.horizon = get_double(g, "$.grid", "horizon", cfg.grid.horizon);
    cfg.grid.n_steps = static_cast<std::size_t>(
        get_int(g, "$.grid", "n_steps",
                static_cast<std::int64_t>(cfg.grid.n_steps)));
  }
  if (doc.contains("process")) cfg.process = parse_process(doc["process"], "$.process");
  cfg.transform = get_string(doc, "$", "transform", cfg.transform);
  if (doc.contains("family")) cfg.family = parse_family(doc["family"], "$.family");
  cfg.k_min = static_cast<int>(get_int(doc, "$", "k_min", cfg.k_min));
  cfg.k_max = static_cast<int>(get_int(doc, "$", "k_max", cfg.k_max));
  if (doc.contains("schemes")) {
    if (!doc["schemes"].is_array()) fail("$.schemes", "expected an array");
    for (std::size_t i = 0; i < doc["schemes"].size(); ++i)
      cfg.schemes.push_back(parse_scheme(
          doc["schemes"][i], "$.schemes[" + std::to_string(i) + "]"));
  }
  cfg.seeds = static_cast<std::size_t>(
      get_int(doc, "$", "seeds", static_cast<std::int64_t>(cfg.seeds)));
  cfg.base_seed = static_cast<std::uint64_t>(
      get_int(doc, "$", "base_seed", static_cast<std::int64_t>(cfg.base_seed)));
  cfg.threshold_a = get_double(doc, "$", "threshold_a", cfg.threshold_a);
  if (doc.contains("tolerances"))
    cfg.tolerances = parse_tolerances(doc["tolerances"], "$.tolerances");
  cfg.output_dir = get_string(doc, "$", "output_dir", cfg.output_dir);
  cfg.jobs = static_cast<int>(get_int(doc, "$", "jobs", cfg.jobs));
  if (doc.contains("decomposition"))
    cfg.decomposition =
        parse_decomposition(doc["decomposition"], "$.decomposition");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("config: cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::string canonical_config_json(const ExperimentConfig& cfg) {
  json doc;
  doc["grid"] = json{{"horizon", cfg.grid.horizon}, {"n_steps", cfg.grid.n_steps}};
  doc["process"] = process_to_json(cfg.process);
  doc["transform"] = cfg.transform;
  doc["family"] = family_to_json(cfg.family);
  doc["k_min"] = cfg.k_min;
  doc["k_max"] = cfg.k_max;
  json schemes = json::array();
  for (const auto& s : cfg.schemes) schemes.push_back(scheme_to_json(s));
  doc["schemes"] = schemes;
  doc["seeds"] = cfg.seeds;
  doc["base_seed"] = cfg.base_seed;
  doc["threshold_a"] = cfg.threshold_a;
  doc["tolerances"] = tolerances_to_json(cfg.tolerances);
  // output_dir and jobs are execution environment, not scientific content;
  // two runs of the same experiment must hash equal regardless of where the
  // artifacts land or how many workers computed them.
  doc["decomposition"] = decomposition_to_json(cfg.decomposition);
  return doc.dump();
}

ExperimentConfig desk_scenario_config() {
  ExperimentConfig cfg;
  cfg.grid = TimeGrid{1.0, std::size_t{1} << 18};
  cfg.process.bm_sigma = 1.0;
  PoissonJumps pj;
  pj.intensity = 5.0;
  pj.law = JumpLaw::symmetric_pair(0.5);
  cfg.process.jumps.poisson.push_back(pj);
  cfg.process.zero_qv.kind = ZeroQvSpec::Kind::Fbm;
  cfg.process.zero_qv.hurst = 0.75;
  cfg.process.zero_qv.scale = 0.3;
  FixedTimeJump ft;
  ft.grid_index = cfg.grid.n_steps / 2;
  ft.fire_prob = 0.5;
  ft.law = JumpLaw::symmetric_pair(0.3);
  cfg.process.jumps.fixed_times.push_back(ft);
  cfg.transform = "square";
  cfg.family.kind = PerturbationFamily::Kind::AddBM;
  cfg.seeds = 50;
  cfg.base_seed = 12345;
  cfg.threshold_a = 0.4;
  return cfg;
}

}  // namespace qvlab
