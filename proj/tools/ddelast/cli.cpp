#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "ddelast/csv.hpp"
#include "ddelast/run_record.hpp"

namespace ddelast::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDiverged:
    case ErrorCode::kSingular:
    case ErrorCode::kNoConvergence:
    case ErrorCode::kAllFailed:
      return kExitSolver;
    case ErrorCode::kBudgetExceeded:
      return kExitBudget;
    default:
      return kExitConfig;
  }
}

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> solver;
  std::optional<int> alpha;
  std::optional<int> steps;
  std::optional<int> k_max;
  std::optional<std::string> init;
  bool force = false;

  Overrides overrides() const { return {solver, alpha, steps, k_max, init, seed}; }
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  return out;
}

fs::path output_dir(const Options& o) {
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::string kind_tag(SolverKind kind) { return kind == SolverKind::kAdm ? "adm" : "go_adm"; }

int cmd_generate(const Options& o, std::ostream& out) {
  const json j = read_json(o.config);
  std::ostringstream text;
  if (j.contains("cyclic")) {
    const json& c = j.at("cyclic");
    CyclicTestSpec spec;
    try {
      if (c.contains("area")) {
        spec.area = c.at("area").get<double>();
      } else {
        RopeOptions rope;
        rope.diameter = c.value("diameter", rope.diameter);
        spec.area = rope_area(rope);
      }
      spec.peak_force = c.value("peak_force", spec.peak_force);
      spec.min_force = c.value("min_force", spec.min_force);
      spec.loading_modulus = c.value("loading_modulus", spec.loading_modulus);
      spec.slack_strain = c.value("slack_strain", spec.slack_strain);
      spec.slack_stress = c.value("slack_stress", spec.slack_stress);
      spec.unloading_modulus = c.value("unloading_modulus", spec.unloading_modulus);
      spec.ratchet = c.value("ratchet", spec.ratchet);
      spec.reload_exponent = c.value("reload_exponent", spec.reload_exponent);
      spec.points_per_branch = c.value("points_per_branch", spec.points_per_branch);
      spec.seconds_per_point = c.value("seconds_per_point", spec.seconds_per_point);
    } catch (const json::exception& e) {
      fail(ErrorCode::kConfig, std::string("cyclic test: ") + e.what());
    }
    write_cyclic_csv(generate_cyclic_test(spec), text);
  } else {
    write_csv(build_dataset(j, fs::path(o.config).parent_path(), std::nullopt, o.overrides()), text);
  }
  if (o.out.empty()) {
    out << text.str();
  } else {
    open_output(o.out) << text.str();
  }
  return kExitOk;
}

int cmd_solve(const Options& o, std::ostream& out) {
  const Experiment ex = load_experiment(o.config, o.overrides());
  const fs::path dir = output_dir(o);
  {
    auto f = open_output(dir / "dataset.csv");
    write_csv(ex.dataset, f);
  }
  int status = kExitOk;
  for (SolverKind kind : ex.kinds) {
    const RunRecord record = solve_structure(ex.structure, ex.dataset, ex.solver, kind);
    const std::string tag = kind_tag(kind);
    open_output(dir / ("run_" + tag + ".json")) << run_record_json(record) << '\n';
    {
      auto f = open_output(dir / (tag + "_objective.csv"));
      write_objective_csv(record, f);
    }
    if (!record.steps.empty()) {
      const auto& last = record.last();
      auto deformed = open_output(dir / (tag + "_deformed.csv"));
      write_deformed_csv(ex.structure, last.state, deformed);
      auto elements = open_output(dir / (tag + "_elements.csv"));
      write_element_csv(ex.structure, last, ex.dataset, record.c, elements);
      auto overlay = open_output(dir / (tag + "_overlay.csv"));
      write_overlay_csv(ex.dataset, last.assignment, overlay);
    }
    for (const auto& w : record.warnings) out << "warning: " << w << '\n';
    if (record.completed()) {
      out << to_string(kind) << ": objective " << format_double(record.last().objective) << " after "
          << record.steps.size() << " load steps\n";
    } else {
      out << to_string(kind) << ": " << to_string(record.failure->code) << " at load step "
          << record.failure->step << ": " << record.failure->message << '\n';
      status = exit_code_for(record.failure->code);
    }
  }
  return status;
}

int cmd_converge(const Options& o, std::ostream& out) {
  const json j = read_json(o.config);
  const fs::path dir = output_dir(o);
  try {
    ConvergenceOptions base;
    base.spec = parse_benchmark(j.at("benchmark"));
    base.elements = j.at("elements").get<std::vector<std::size_t>>();
    base.data_points = j.at("data_points").get<std::vector<std::size_t>>();
    base.strain_range_factor = j.value("strain_range_factor", base.strain_range_factor);
    const json solver = j.contains("solver") ? j.at("solver") : json::object();
    json runs = j.contains("runs") ? j.at("runs") : json::array({json{{"alpha", 0}, {"steps", 1}}});
    for (const auto& run : runs) {
      const int alpha = run.at("alpha").get<int>();
      if (o.alpha && *o.alpha != alpha) continue;
      ConvergenceOptions opts = base;
      opts.spec.alpha = alpha;
      json s = solver;
      s["steps"] = run.value("steps", 1);
      s.erase("load_factors");
      Overrides ov = o.overrides();
      ov.alpha = alpha;
      opts.config = parse_solver_config(s, ov);
      opts.solver = parse_solver_kinds(s, ov).front();
      const ConvergenceTable table = run_convergence_study(opts);
      auto f = open_output(dir / ("converge_alpha" + std::to_string(alpha) + ".csv"));
      write_convergence_csv(table, f);
      out << "alpha " << alpha << " (" << to_string(opts.solver) << "): relative L2 error\n";
      for (std::size_t r = 0; r < table.elements.size(); ++r) {
        out << "  " << table.elements[r] << " elements:";
        for (std::size_t c = 0; c < table.data_points.size(); ++c) {
          const auto& cell = table.at(r, c);
          out << ' ' << (cell.converged ? format_double(cell.error) : "failed");
        }
        out << '\n';
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, o.config + ": " + e.what());
  }
  return kExitOk;
}

int cmd_rope(const Options& o, std::ostream& out) {
  const json j = read_json(o.config);
  RopeOptions opts = parse_rope_options(j, o.overrides());
  opts.force = o.force;
  std::vector<IndexRange> ranges;
  Dataset data = [&] {
    try {
      for (const auto& r : j.at("ranges")) ranges.push_back({r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>()});
      ColumnMapping mapping;
      mapping.strain_column = j.value("strain_column", std::string("strain"));
      mapping.stress_column.reset();
      mapping.force_column = j.value("force_column", std::string("force_N"));
      mapping.area = rope_area(opts);
      fs::path csv(j.at("csv").get<std::string>());
      if (csv.is_relative()) csv = fs::path(o.config).parent_path() / csv;
      return load_csv(csv, mapping);
    } catch (const json::exception& e) {
      fail(ErrorCode::kConfig, o.config + ": " + e.what());
    }
  }();

  const RopeResult result = run_rope(data, ranges, opts);
  const fs::path dir = output_dir(o);
  {
    auto f = open_output(dir / "load_deflection.csv");
    write_load_deflection_csv(result, f);
  }
  json phases = json::array();
  int status = kExitOk;
  for (const auto& p : result.phases) {
    std::vector<double> objectives;
    for (const auto& s : p.record.steps) objectives.push_back(s.objective);
    json ph{{"name", p.name},
            {"warm_started", p.warm_started},
            {"points", p.data.size()},
            {"dataset_consistent", p.data_check.consistent},
            {"dataset_violations", p.data_check.violations.size()},
            {"states_consistent", p.state_check.consistent},
            {"state_violations", p.state_check.violations.size()},
            {"steps", p.record.steps.size()},
            {"objectives", objectives}};
    if (p.record.failure) {
      ph["failure"] = {{"code", std::string(to_string(p.record.failure->code))},
                       {"message", p.record.failure->message},
                       {"step", p.record.failure->step}};
      status = exit_code_for(p.record.failure->code);
    }
    phases.push_back(std::move(ph));
    out << p.name << ": " << p.record.steps.size() << " load steps"
        << (p.warm_started ? ", warm-started" : "")
        << (p.state_check.consistent ? "" : ", computed states fail the consistency check") << '\n';
  }
  const json summary{{"solver", to_string(opts.solver)},
                     {"alpha", opts.alpha},
                     {"elements", opts.elements},
                     {"length", opts.length},
                     {"area", rope_area(opts)},
                     {"completed", result.completed},
                     {"hysteresis_area", result.hysteresis_area},
                     {"phases", std::move(phases)}};
  open_output(dir / "rope_summary.json") << summary.dump(2) << '\n';
  out << "hysteresis loop area: " << format_double(result.hysteresis_area) << " N*m\n";
  return status;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  const Experiment ex = load_experiment(o.config, o.overrides());
  const double gamma = ex.solver.load_factors.back();
  const Eigen::VectorXd load = gamma * ex.structure.reference_load();
  const OracleResult best = enumerate_global(ex.structure, ex.dataset, ex.solver, load, ex.oracle);

  const double c = objective_weight(ex.solver, ex.dataset);
  std::string warning;
  const Assignment init = initialize_data(ex.structure, ex.dataset, ex.solver, c, load, &warning);
  const State zero = State::zeros(ex.structure);
  const SolveResult adm = adm_solve(ex.structure, zero, init, ex.dataset, load, ex.solver, c);
  const SolveResult go = go_adm_solve(ex.structure, zero, init, ex.dataset, load, ex.solver, c);

  auto entry = [&](double objective, const Assignment& a) {
    return json{{"objective", objective},
                {"assignment", a.indices},
                {"ties_oracle", objective == best.best_objective},
                {"same_assignment_as_oracle", a == best.best_assignment}};
  };
  json report{{"load_factor", gamma},
              {"c", c},
              {"oracle",
               {{"objective", best.best_objective},
                {"assignment", best.best_assignment.indices},
                {"n_evaluated", best.n_evaluated},
                {"n_failed", best.n_failed}}},
              {"adm", entry(adm.objective, adm.assignment)},
              {"go_adm", entry(go.objective, go.assignment)},
              {"dominance_holds", best.best_objective <= go.objective && go.objective <= adm.objective}};
  if (!warning.empty()) report["warning"] = warning;
  const fs::path dir = output_dir(o);
  open_output(dir / "oracle_comparison.json") << report.dump(2) << '\n';
  {
    auto f = open_output(dir / "oracle_comparison.csv");
    f << "method,objective,ties_oracle,assignment\n";
    auto row = [&](const char* name, double obj, const Assignment& a) {
      f << name << ',' << format_double(obj) << ',' << (obj == best.best_objective ? 1 : 0) << ',';
      for (std::size_t i = 0; i < a.size(); ++i) f << (i ? " " : "") << a.indices[i];
      f << '\n';
    };
    row("oracle", best.best_objective, best.best_assignment);
    row("adm", adm.objective, adm.assignment);
    row("go-adm", go.objective, go.assignment);
  }
  out << "oracle " << format_double(best.best_objective) << " (" << best.n_evaluated << " evaluated, "
      << best.n_failed << " failed), go-adm " << format_double(go.objective) << ", adm "
      << format_double(adm.objective) << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Data-driven solver for bars and trusses with nonlinear strain measures", "ddelast"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd, bool solver_flags) {
    cmd->add_option("--config", o.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output directory (file for generate)");
    cmd->add_option("--seed", o.seed, "seed for random initialisation and noise");
    if (!solver_flags) return;
    cmd->add_option("--solver", o.solver, "adm or go-adm")->check(CLI::IsMember({"adm", "go-adm"}));
    cmd->add_option("--alpha", o.alpha, "strain measure: 0 linear, 1 nonlinear")->check(CLI::IsMember({0, 1}));
    cmd->add_option("--steps", o.steps, "number of equal load steps")->check(CLI::PositiveNumber);
    cmd->add_option("--kmax", o.k_max, "greedy search budget")->check(CLI::NonNegativeNumber);
    cmd->add_option("--init", o.init, "initial data assignment")
        ->check(CLI::IsMember({"random", "stress-free", "structure-specific"}));
  };

  auto* generate = app.add_subcommand("generate", "write a dataset as CSV");
  add_common(generate, false);
  auto* solve = app.add_subcommand("solve", "run ADM and/or GO-ADM on a structure");
  add_common(solve, true);
  auto* converge = app.add_subcommand("converge", "mesh/dataset convergence study on the manufactured bar");
  add_common(converge, true);
  auto* rope = app.add_subcommand("rope", "three-phase cyclic load-deflection run");
  add_common(rope, true);
  rope->add_flag("--force", o.force, "accept sub-datasets that fail the consistency check");
  auto* oracle = app.add_subcommand("oracle", "compare ADM and GO-ADM against exhaustive enumeration");
  add_common(oracle, true);

  std::vector<const char*> argv{"ddelast"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (generate->parsed()) return cmd_generate(o, out);
    if (solve->parsed()) return cmd_solve(o, out);
    if (converge->parsed()) return cmd_converge(o, out);
    if (rope->parsed()) return cmd_rope(o, out);
    if (oracle->parsed()) return cmd_oracle(o, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace ddelast::cli
