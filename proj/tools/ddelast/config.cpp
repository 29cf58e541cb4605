#include "config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "ddelast/errors.hpp"

namespace ddelast::cli {

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<T>() : fallback;
}

std::filesystem::path resolve(const std::filesystem::path& base_dir, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

// Configs are small; a json exception anywhere in them is a config error.
template <typename F>
auto config_guard(const std::string& what, F&& body) {
  try {
    return body();
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, what + ": " + e.what());
  }
}

LawSpec parse_law(const json& j, const std::optional<BenchmarkSpec>& reference) {
  LawSpec law;
  const auto name = j.at("law").get<std::string>();
  if (name == "linear") {
    law.law = LawSpec::Law::kLinear;
  } else if (name == "sigmoid") {
    law.law = LawSpec::Law::kSigmoid;
  } else {
    fail(ErrorCode::kConfig, "unknown dataset law '" + name + "'");
  }
  if (j.contains("scale")) {
    law.scale = j.at("scale").get<double>();
  } else if (j.contains("modulus")) {
    law.scale = j.at("modulus").get<double>();
  } else if (j.contains("max_stress")) {
    law.scale = j.at("max_stress").get<double>();
  } else if (reference && law.law == LawSpec::Law::kLinear) {
    law.scale = reference->modulus;
  } else {
    fail(ErrorCode::kConfig, "dataset needs 'scale' (modulus or maximum stress)");
  }
  law.n_points = j.at("points").get<std::size_t>();
  if (j.contains("strain_max")) {
    law.strain_max = j.at("strain_max").get<double>();
  } else if (reference) {
    law.strain_max = get_or<double>(j, "strain_range_factor", 1.5) * reference_strain_max(*reference);
  } else {
    fail(ErrorCode::kConfig, "dataset needs 'strain_max'");
  }
  return law;
}

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kConfig, "cannot open config '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
}

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "adm") return SolverKind::kAdm;
  if (name == "go-adm") return SolverKind::kGoAdm;
  fail(ErrorCode::kConfig, "unknown solver '" + name + "' (expected adm or go-adm)");
}

InitMode parse_init_mode(const std::string& name) {
  if (name == "random") return InitMode::kRandom;
  if (name == "stress-free") return InitMode::kStressFree;
  if (name == "structure-specific") return InitMode::kStructureSpecific;
  fail(ErrorCode::kConfig, "unknown init mode '" + name + "'");
}

SolverConfig parse_solver_config(const json& j, const Overrides& overrides) {
  return config_guard("solver settings", [&] {
    SolverConfig c;
    c.alpha = overrides.alpha.value_or(get_or<int>(j, "alpha", c.alpha));
    if (j.contains("c") && !j.at("c").is_null()) c.c = j.at("c").get<double>();
    c.beta_s = get_or<double>(j, "beta_s", c.beta_s);
    c.newton_tol = get_or<double>(j, "newton_tol", c.newton_tol);
    c.newton_max_iters = get_or<int>(j, "newton_max_iters", c.newton_max_iters);
    c.adm_max_iters = get_or<int>(j, "adm_max_iters", c.adm_max_iters);
    c.k_max = overrides.k_max.value_or(get_or<int>(j, "k_max", c.k_max));
    c.init_mode = parse_init_mode(overrides.init.value_or(get_or<std::string>(j, "init", "structure-specific")));
    c.seed = overrides.seed.value_or(get_or<std::uint64_t>(j, "seed", c.seed));

    if (j.contains("load_factors") && !overrides.steps) {
      c.load_factors = j.at("load_factors").get<std::vector<double>>();
    } else {
      double gamma = 1.0;
      if (j.contains("load_factor")) {
        gamma = j.at("load_factor").get<double>();
      } else if (j.contains("load_factors") && !j.at("load_factors").empty()) {
        gamma = j.at("load_factors").back().get<double>();
      }
      const int steps = overrides.steps.value_or(get_or<int>(j, "steps", 1));
      require(steps >= 1, ErrorCode::kConfig, "steps must be at least 1");
      c.load_factors.clear();
      for (int s = 1; s <= steps; ++s) c.load_factors.push_back(gamma * s / steps);
    }
    c.validate();
    return c;
  });
}

std::vector<SolverKind> parse_solver_kinds(const json& j, const Overrides& overrides) {
  if (overrides.solver) return {parse_solver_kind(*overrides.solver)};
  return config_guard("solver kind", [&] {
    std::vector<SolverKind> kinds;
    if (!j.contains("kind")) return std::vector<SolverKind>{SolverKind::kAdm};
    const auto& k = j.at("kind");
    if (k.is_array()) {
      for (const auto& name : k) kinds.push_back(parse_solver_kind(name.get<std::string>()));
    } else {
      kinds.push_back(parse_solver_kind(k.get<std::string>()));
    }
    require(!kinds.empty(), ErrorCode::kConfig, "solver kind list is empty");
    return kinds;
  });
}

BenchmarkSpec parse_benchmark(const json& j) {
  return config_guard("benchmark", [&] {
    BenchmarkSpec spec;
    spec.modulus = get_or<double>(j, "modulus", spec.modulus);
    spec.beta = get_or<double>(j, "beta", spec.beta);
    spec.length = get_or<double>(j, "length", spec.length);
    spec.alpha = get_or<int>(j, "alpha", spec.alpha);
    if (j.contains("area")) {
      spec.area = j.at("area").get<double>();
    } else if (j.contains("radius")) {
      spec.area = std::numbers::pi * std::pow(j.at("radius").get<double>(), 2);
    }
    return spec;
  });
}

std::optional<BenchmarkSpec> manufactured_spec(const json& structure) {
  if (!structure.contains("bar") || !structure.at("bar").contains("manufactured")) return std::nullopt;
  const auto& bar = structure.at("bar");
  json merged = bar.at("manufactured");
  merged["length"] = bar.at("length");
  if (bar.contains("area")) merged["area"] = bar.at("area");
  if (bar.contains("radius")) merged["radius"] = bar.at("radius");
  return parse_benchmark(merged);
}

Dataset build_dataset(const json& j, const std::filesystem::path& base_dir,
                      const std::optional<BenchmarkSpec>& reference, const Overrides& overrides) {
  return config_guard("dataset", [&]() -> Dataset {
    if (j.contains("csv")) {
      ColumnMapping mapping;
      mapping.strain_column = get_or<std::string>(j, "strain_column", "strain");
      if (j.contains("force_column")) {
        mapping.stress_column.reset();
        mapping.force_column = j.at("force_column").get<std::string>();
        mapping.area = j.at("area").get<double>();
      } else {
        mapping.stress_column = get_or<std::string>(j, "stress_column", "stress");
      }
      return load_csv(resolve(base_dir, j.at("csv").get<std::string>()), mapping);
    }

    const LawSpec law = parse_law(j, reference);
    Dataset data = j.contains("unsymmetric") ? make_unsymmetric(law, j.at("unsymmetric").get<double>()) : generate(law);
    if (j.contains("noise")) {
      const auto& noise = j.at("noise");
      const auto seed = overrides.seed.value_or(get_or<std::uint64_t>(noise, "seed", 0));
      Dataset noisy = add_noise(data, noise.at("sigma").get<double>(), seed);
      if (get_or<bool>(noise, "repair", false)) return repair_with_originals(noisy, data);
      return noisy;
    }
    return data;
  });
}

Experiment load_experiment(const std::filesystem::path& path, const Overrides& overrides) {
  const json j = read_json(path);
  const auto base = path.parent_path();
  return config_guard(path.string(), [&] {
    json structure_json = j.at("structure");
    if (structure_json.is_string()) structure_json = read_json(resolve(base, structure_json.get<std::string>()));
    Structure structure = parse_structure(structure_json.dump());
    const json solver = j.contains("solver") ? j.at("solver") : json::object();
    Dataset dataset = build_dataset(j.at("dataset"), base, manufactured_spec(structure_json), overrides);
    OracleOptions oracle;
    if (j.contains("oracle")) {
      oracle.budget = get_or<double>(j.at("oracle"), "budget", oracle.budget);
      oracle.linear_start = get_or<bool>(j.at("oracle"), "linear_start", oracle.linear_start);
    }
    return Experiment{std::move(structure_json), std::move(structure), std::move(dataset),
                      parse_solver_config(solver, overrides), parse_solver_kinds(solver, overrides), oracle};
  });
}

RopeOptions parse_rope_options(const json& j, const Overrides& overrides) {
  return config_guard("rope", [&] {
    RopeOptions o;
    o.length = get_or<double>(j, "length", o.length);
    o.diameter = get_or<double>(j, "diameter", o.diameter);
    o.elements = get_or<std::size_t>(j, "elements", o.elements);
    o.alpha = overrides.alpha.value_or(get_or<int>(j, "alpha", o.alpha));
    o.prepend_origin = get_or<bool>(j, "prepend_origin", o.prepend_origin);
    const json solver = j.contains("solver") ? j.at("solver") : json::object();
    o.config = parse_solver_config(solver, overrides);
    o.solver = parse_solver_kinds(solver, overrides).front();
    if (j.contains("phase_names")) o.phase_names = j.at("phase_names").get<std::vector<std::string>>();
    return o;
  });
}

}  // namespace ddelast::cli
