// Command-line front end: scenario generation, quadratic-variation reports,
// decomposition and stability suites, and the full verification run.
//
// Exit codes: 0 success / all verdicts pass, 1 verdict failure, 2 usage,
// config or I/O error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qvlab/acceptance.hpp"
#include "qvlab/config.hpp"
#include "qvlab/csv.hpp"
#include "qvlab/experiments.hpp"
#include "qvlab/generators.hpp"
#include "qvlab/pathio.hpp"
#include "qvlab/quadvar.hpp"

namespace {

using namespace qvlab;

struct CommonOpts {
  std::string config_file;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string depths;  // "MIN:MAX" or single depth
  std::vector<std::string> schemes;
  std::string transform;
  std::optional<double> threshold_a;
  std::vector<std::string> inputs;  // qv: pre-serialized path files
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_file, "JSON config file (default: built-in scenario)");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seed, "base seed override");
  cmd->add_option("--jobs", o.jobs, "worker threads (0 = all cores)");
  cmd->add_option("--depths", o.depths, "dyadic depth range MIN:MAX (or a single depth)");
  cmd->add_option("--scheme", o.schemes,
                  "partition scheme (repeatable): dyadic:K, shifted:K, "
                  "hitting:EPS:CAP, random:GAP:SEED");
  cmd->add_option("--transform", o.transform, "transform name (identity|square|abs|cubic)");
  cmd->add_option("--threshold-a", o.threshold_a, "jump size threshold a");
}

PartitionScheme parse_scheme_arg(const std::string& text) {
  PartitionScheme s;
  const auto parts = [&] {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
      if (c == ':') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  }();
  const std::string& kind = parts[0];
  if (kind == "dyadic" || kind == "shifted") {
    if (parts.size() != 2) throw std::invalid_argument("scheme: expected " + kind + ":K");
    s.kind = kind == "dyadic" ? PartitionScheme::Kind::Dyadic
                              : PartitionScheme::Kind::ShiftedDyadic;
    s.depth = std::stoi(parts[1]);
  } else if (kind == "hitting") {
    if (parts.size() != 3) throw std::invalid_argument("scheme: expected hitting:EPS:CAP");
    s.kind = PartitionScheme::Kind::HittingTime;
    s.epsilon = std::stod(parts[1]);
    s.cap = std::stod(parts[2]);
  } else if (kind == "random") {
    if (parts.size() != 3) throw std::invalid_argument("scheme: expected random:GAP:SEED");
    s.kind = PartitionScheme::Kind::RandomMesh;
    s.mean_gap = std::stod(parts[1]);
    s.seed = std::stoull(parts[2]);
  } else {
    throw std::invalid_argument("scheme: unknown kind '" + kind + "'");
  }
  return s;
}

ExperimentConfig resolve_config(const CommonOpts& o) {
  ExperimentConfig cfg = o.config_file.empty() ? desk_scenario_config()
                                               : load_config_file(o.config_file);
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
  if (!o.transform.empty()) cfg.transform = o.transform;
  if (o.threshold_a) cfg.threshold_a = *o.threshold_a;
  if (!o.depths.empty()) {
    const auto colon = o.depths.find(':');
    if (colon == std::string::npos) {
      cfg.k_min = cfg.k_max = std::stoi(o.depths);
    } else {
      cfg.k_min = std::stoi(o.depths.substr(0, colon));
      cfg.k_max = std::stoi(o.depths.substr(colon + 1));
    }
  }
  if (!o.schemes.empty()) {
    cfg.schemes.clear();
    for (const auto& text : o.schemes) cfg.schemes.push_back(parse_scheme_arg(text));
  }
  cfg.validate();
  return cfg;
}

std::filesystem::path prepare_out(const ExperimentConfig& cfg) {
  std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  write_text_file((dir / "manifest.json").string(),
                  run_manifest(canonical_config_json(cfg), cfg.base_seed));
  return dir;
}

std::string member_file_name(std::size_t member) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "path_%03zu.csv", member);
  return buf;
}

int cmd_generate(const CommonOpts& o) {
  const ExperimentConfig cfg = resolve_config(o);
  const auto dir = prepare_out(cfg);
  for (std::size_t m = 0; m < cfg.seeds; ++m) {
    const DirichletPath dp = gen_dirichlet(cfg.process, cfg.grid, cfg.base_seed, m);
    write_path_file((dir / member_file_name(m)).string(), dp.x);
  }
  std::cout << "wrote " << cfg.seeds << " path file(s) to " << dir.string() << "\n";
  return 0;
}

int cmd_qv(const CommonOpts& o) {
  const ExperimentConfig cfg = resolve_config(o);
  const auto dir = prepare_out(cfg);
  const RefiningSequence rs = dyadic_refining(cfg.grid, cfg.k_min, cfg.k_max);

  std::vector<std::pair<std::string, CadlagPath>> paths;
  if (!o.inputs.empty()) {
    for (const auto& file : o.inputs) paths.emplace_back(file, read_path_file(file));
  } else {
    for (std::size_t m = 0; m < cfg.seeds; ++m)
      paths.emplace_back(member_file_name(m),
                         gen_dirichlet(cfg.process, cfg.grid, cfg.base_seed, m).x);
  }

  CsvWriter csv({"source", "depth", "mesh", "terminal_sum", "estimate",
                 "jump_part", "cont_part_estimate"});
  CsvWriter sweep({"source", "scheme", "mesh", "sup_deviation"});
  bool any_sweep = false;
  for (const auto& [name, path] : paths) {
    if (path.grid().n_steps != cfg.grid.n_steps)
      throw std::invalid_argument("qv: path grid does not match config grid: " + name);
    const QVReport q = weak_qv(path, rs);
    for (std::size_t d = 0; d < q.rows.size(); ++d)
      csv.add_row({name, std::to_string(rs.depth_labels[d]),
                   CsvWriter::format(q.rows[d].mesh),
                   CsvWriter::format(q.rows[d].s_values.back()),
                   CsvWriter::format(q.estimate), CsvWriter::format(q.jump_part),
                   CsvWriter::format(q.cont_part_estimate)});
    if (!cfg.schemes.empty()) {
      any_sweep = true;
      const std::vector<double> reference = qv_curve(path, rs.depths.back());
      const DeviationReport dev = strong_qv_sweep(path, cfg.schemes, reference);
      for (const auto& sd : dev.schemes)
        sweep.add_row({name, sd.label, CsvWriter::format(sd.mesh),
                       CsvWriter::format(sd.sup_deviation)});
    }
  }
  csv.write_file((dir / "qv.csv").string());
  if (any_sweep) sweep.write_file((dir / "qv_scheme_sweep.csv").string());
  std::cout << "wrote qv report for " << paths.size() << " path(s) to "
            << dir.string() << "\n";
  return 0;
}

int cmd_decompose(const CommonOpts& o) {
  const ExperimentConfig cfg = resolve_config(o);
  const auto dir = prepare_out(cfg);
  const DecompositionSuiteReport report = run_decomposition_suite(cfg);
  write_text_file((dir / "decomposition.csv").string(), report.to_csv());
  for (const auto& v : report.verdicts)
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << " (" << v.measured
              << " vs " << v.threshold << ")\n";
  return report.pass ? 0 : 1;
}

int cmd_stability(const CommonOpts& o) {
  const ExperimentConfig cfg = resolve_config(o);
  const auto dir = prepare_out(cfg);
  const StabilityReport report = run_stability(cfg);
  write_text_file((dir / "stability.csv").string(), report.to_csv());
  std::cout << (report.pass ? "PASS" : "FAIL") << " stability: monotone="
            << report.monotone << " bounds=" << report.bounds_ok
            << " slope=" << report.slope << "\n";
  if (!report.hypothesis_note.empty())
    std::cout << "note: " << report.hypothesis_note << "\n";
  return report.pass ? 0 : 1;
}

int cmd_check(const CommonOpts& o) {
  ExperimentConfig cfg = desk_scenario_config();
  if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
  if (o.jobs) cfg.jobs = *o.jobs;
  const auto dir = prepare_out(cfg);
  const AcceptanceReport report = run_acceptance(cfg.jobs);
  CsvWriter summary({"id", "name", "pass", "detail"});
  for (const auto& c : report.criteria) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << "[" << c.id << "] " << c.name
              << ": " << c.detail << "\n";
    summary.add_row({std::to_string(c.id), c.name, c.pass ? "1" : "0", c.detail});
    for (const auto& [name, content] : c.files)
      write_text_file((dir / name).string(), content);
  }
  summary.write_file((dir / "check_summary.csv").string());
  std::cout << (report.all_pass ? "ALL PASS" : "FAILURES PRESENT") << "\n";
  return report.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pathwise quadratic-variation laboratory"};
  app.require_subcommand(1);

  CommonOpts gen_o, qv_o, dec_o, stab_o, check_o;
  CLI::App* gen = app.add_subcommand("generate", "Simulate scenario paths and write path files");
  add_common(gen, gen_o);
  CLI::App* qv = app.add_subcommand("qv", "Quadratic-variation report for generated or supplied paths");
  add_common(qv, qv_o);
  qv->add_option("--input", qv_o.inputs, "path file(s) to analyze instead of simulating");
  CLI::App* dec = app.add_subcommand("decompose", "Run the decomposition verification suite");
  add_common(dec, dec_o);
  CLI::App* stab = app.add_subcommand("stability", "Run the perturbation-stability suite");
  add_common(stab, stab_o);
  CLI::App* check = app.add_subcommand("check", "Run the full verification suite");
  add_common(check, check_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_o);
    if (qv->parsed()) return cmd_qv(qv_o);
    if (dec->parsed()) return cmd_decompose(dec_o);
    if (stab->parsed()) return cmd_stability(stab_o);
    if (check->parsed()) return cmd_check(check_o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
