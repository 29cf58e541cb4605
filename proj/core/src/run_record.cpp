#include "ddelast/run_record.hpp"

#include <ostream>

#include <json.hpp>

#include "ddelast/csv.hpp"

namespace ddelast {

namespace {

using nlohmann::json;

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const SolverConfig& config) {
  json out{{"alpha", config.alpha},
           {"beta_s", config.beta_s},
           {"newton_tol", config.newton_tol},
           {"newton_max_iters", config.newton_max_iters},
           {"adm_max_iters", config.adm_max_iters},
           {"k_max", config.k_max},
           {"load_factors", config.load_factors},
           {"init", to_string(config.init_mode)},
           {"seed", config.seed}};
  out["c"] = config.c ? json(*config.c) : json(nullptr);
  return out;
}

}  // namespace

std::string run_record_json(const RunRecord& record, bool include_states) {
  json steps = json::array();
  for (const auto& step : record.steps) {
    json s{{"load_factor", step.load_factor},
           {"objective", step.objective},
           {"assignment", step.assignment.indices},
           {"newton_iterations", step.stats.newton_iterations},
           {"adm_iterations", step.stats.adm_iterations},
           {"greedy_searches", step.stats.greedy_searches},
           {"greedy_failures", step.stats.greedy_failures},
           {"improved", step.improved},
           {"committed_objectives", step.committed_objectives},
           {"timing",
            {{"assembly_seconds", step.stats.assembly_seconds},
             {"linear_solve_seconds", step.stats.linear_solve_seconds},
             {"greedy_seconds", step.stats.greedy_seconds},
             {"wall_seconds", step.wall_seconds}}}};
    if (include_states) {
      s["state"] = {{"u", to_json(step.state.u)},
                    {"e", to_json(step.state.e)},
                    {"s", to_json(step.state.s)},
                    {"mu", to_json(step.state.mu)},
                    {"lambda", to_json(step.state.lambda)}};
    }
    steps.push_back(std::move(s));
  }
  json out{{"solver", to_string(record.solver)},
           {"config", to_json(record.config)},
           {"c", record.c},
           {"completed", record.completed()},
           {"warnings", record.warnings},
           {"steps", std::move(steps)}};
  if (record.failure) {
    out["failure"] = {{"code", std::string(to_string(record.failure->code))},
                      {"message", record.failure->message},
                      {"step", record.failure->step}};
  } else {
    out["failure"] = nullptr;
  }
  return out.dump(2);
}

void write_deformed_csv(const Structure& structure, const State& state, std::ostream& out) {
  out << "node,x_ref,y_ref,u_x,u_y,x,y\n";
  for (std::size_t n = 0; n < structure.n_nodes(); ++n) {
    const auto& x = structure.nodes()[n];
    double u[2] = {0.0, 0.0};
    for (int k = 0; k < structure.dim(); ++k) u[k] = state.u[static_cast<Eigen::Index>(structure.dof(n, k))];
    out << n << ',' << format_double(x.x()) << ',' << format_double(x.y()) << ',' << format_double(u[0]) << ','
        << format_double(u[1]) << ',' << format_double(x.x() + u[0]) << ',' << format_double(x.y() + u[1]) << '\n';
  }
}

void write_element_csv(const Structure& structure, const StepRecord& step, const Dataset& data, double c,
                       std::ostream& out) {
  out << "element,strain,stress,data_index,data_strain,data_stress,objective\n";
  for (std::size_t i = 0; i < structure.n_elements(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const DataPoint state{step.state.e[ii], step.state.s[ii]};
    const std::size_t j = step.assignment.indices[i];
    out << i << ',' << format_double(state.strain) << ',' << format_double(state.stress) << ',' << j << ','
        << format_double(data[j].strain) << ',' << format_double(data[j].stress) << ','
        << format_double(element_objective(state, data[j], c, structure.element(i).length)) << '\n';
  }
}

void write_overlay_csv(const Dataset& data, const Assignment& assignment, std::ostream& out) {
  std::vector<int> count(data.size(), 0);
  for (auto j : assignment.indices) ++count[j];
  out << "index,strain,stress,assigned_elements\n";
  for (std::size_t j = 0; j < data.size(); ++j) {
    out << j << ',' << format_double(data[j].strain) << ',' << format_double(data[j].stress) << ',' << count[j]
        << '\n';
  }
}

void write_objective_csv(const RunRecord& record, std::ostream& out) {
  out << "step,load_factor,objective,newton_iterations,adm_iterations,greedy_searches,improved,wall_seconds\n";
  for (std::size_t j = 0; j < record.steps.size(); ++j) {
    const auto& s = record.steps[j];
    out << j << ',' << format_double(s.load_factor) << ',' << format_double(s.objective) << ','
        << s.stats.newton_iterations << ',' << s.stats.adm_iterations << ',' << s.stats.greedy_searches << ','
        << (s.improved ? 1 : 0) << ',' << format_double(s.wall_seconds) << '\n';
  }
}

}  // namespace ddelast
