#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddelast/dataset.hpp"
#include "ddelast/experiments.hpp"
#include "ddelast/oracle.hpp"
#include "ddelast/solvers.hpp"
#include "ddelast/structure.hpp"

namespace ddelast::cli {

using nlohmann::json;

/// Reads a JSON file; parse failures become kConfig errors naming the file.
json read_json(const std::filesystem::path& path);

/// Command-line overrides shared by the solver commands.
struct Overrides {
  std::optional<std::string> solver;
  std::optional<int> alpha;
  std::optional<int> steps;
  std::optional<int> k_max;
  std::optional<std::string> init;
  std::optional<std::uint64_t> seed;
};

SolverKind parse_solver_kind(const std::string& name);
InitMode parse_init_mode(const std::string& name);

/// Solver settings from a "solver" object. The load factors are either listed in
/// "load_factors" or spread evenly as load_factor * j / steps, j = 1..steps.
SolverConfig parse_solver_config(const json& j, const Overrides& overrides);
std::vector<SolverKind> parse_solver_kinds(const json& j, const Overrides& overrides);

/// Manufactured-bar parameters when the structure description has a "manufactured" block.
std::optional<BenchmarkSpec> manufactured_spec(const json& structure);

/// Dataset from a dataset object (generator, CSV file, ...). Relative paths resolve against
/// `base_dir`. `reference` supplies the default strain range for manufactured bars.
Dataset build_dataset(const json& j, const std::filesystem::path& base_dir,
                      const std::optional<BenchmarkSpec>& reference, const Overrides& overrides);

struct Experiment {
  json structure_json;
  Structure structure;
  Dataset dataset;
  SolverConfig solver;
  std::vector<SolverKind> kinds;
  OracleOptions oracle;
};

Experiment load_experiment(const std::filesystem::path& path, const Overrides& overrides);

BenchmarkSpec parse_benchmark(const json& j);
RopeOptions parse_rope_options(const json& j, const Overrides& overrides);

}  // namespace ddelast::cli
