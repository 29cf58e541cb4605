#include "ddelast/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include "ddelast/csv.hpp"
#include "ddelast/errors.hpp"

namespace ddelast {

double relative_l2_error(const Structure& bar, const Eigen::VectorXd& u, const BenchmarkSpec& spec) {
  require(bar.dim() == 1, ErrorCode::kInvalidArgument, "L2 error is defined for bars only");
  const double r = std::sqrt(0.6);
  const std::array<double, 3> xi{-r, 0.0, r};
  const std::array<double, 3> w{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double err2 = 0.0;
  double ref2 = 0.0;
  for (const auto& el : bar.elements()) {
    const double xa = bar.nodes()[el.nodes[0]].x();
    const double xb = bar.nodes()[el.nodes[1]].x();
    const double ua = u[static_cast<Eigen::Index>(el.nodes[0])];
    const double ub = u[static_cast<Eigen::Index>(el.nodes[1])];
    for (std::size_t q = 0; q < 3; ++q) {
      const double t = 0.5 * (1.0 + xi[q]);
      const double x = xa + t * (xb - xa);
      const double uh = ua + t * (ub - ua);
      const double ur = manufactured_displacement(x, spec);
      const double jw = 0.5 * std::abs(xb - xa) * w[q];
      err2 += jw * (uh - ur) * (uh - ur);
      ref2 += jw * ur * ur;
    }
  }
  return std::sqrt(err2 / ref2);
}

double reference_strain_max(const BenchmarkSpec& spec) {
  const double g = spec.beta * std::numbers::pi / spec.length;
  return g + 0.5 * spec.alpha * g * g;
}

ConvergenceTable run_convergence_study(const ConvergenceOptions& options) {
  require(!options.elements.empty() && !options.data_points.empty(), ErrorCode::kConfig,
          "convergence study needs at least one mesh size and one dataset size");
  ConvergenceTable table{options.elements, options.data_points, {}};
  SolverConfig config = options.config;
  config.alpha = options.spec.alpha;
  const double strain_max = options.strain_range_factor * reference_strain_max(options.spec);
  for (std::size_t n_el : options.elements) {
    const Structure bar = build_manufactured_bar(options.spec, n_el);
    for (std::size_t n_d : options.data_points) {
      const Dataset data = generate_linear(options.spec.modulus, n_d, strain_max);
      ConvergenceCell cell{n_el, n_d, 0.0, 0.0, false, {}};
      const RunRecord rec = solve_structure(bar, data, config, options.solver);
      if (rec.completed()) {
        cell.converged = true;
        cell.error = relative_l2_error(bar, rec.last().state.u, options.spec);
        cell.objective = rec.last().objective;
      } else {
        cell.failure = std::string(to_string(rec.failure->code)) + ": " + rec.failure->message;
      }
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

void write_convergence_csv(const ConvergenceTable& table, std::ostream& out) {
  out << "elements,data_points,relative_l2_error,objective,converged\n";
  for (const auto& cell : table.cells) {
    out << cell.elements << ',' << cell.data_points << ',' << format_double(cell.error) << ','
        << format_double(cell.objective) << ',' << (cell.converged ? 1 : 0) << '\n';
  }
}

CyclicTest generate_cyclic_test(const CyclicTestSpec& spec) {
  require(spec.area > 0.0, ErrorCode::kInvalidArgument, "cyclic test needs a positive area");
  require(spec.peak_force > spec.min_force && spec.min_force >= 0.0, ErrorCode::kInvalidArgument,
          "cyclic test needs 0 <= min_force < peak_force");
  require(spec.points_per_branch >= 2, ErrorCode::kInvalidArgument, "cyclic test needs at least 2 points per branch");
  const auto n = spec.points_per_branch;
  const double sigma_peak = spec.peak_force / spec.area;
  const double sigma_min = spec.min_force / spec.area;
  auto loading = [&](double sigma) {
    return sigma / spec.loading_modulus + spec.slack_strain * (1.0 - std::exp(-sigma / spec.slack_stress));
  };
  const double eps_peak = loading(sigma_peak);
  const double eps_min = eps_peak - (sigma_peak - sigma_min) / spec.unloading_modulus;
  const double eps_reload = eps_peak * (1.0 + spec.ratchet);

  CyclicTest test;
  auto add = [&](double force, double strain) {
    test.time.push_back(static_cast<double>(test.time.size()) * spec.seconds_per_point);
    test.force.push_back(force);
    test.strain.push_back(strain);
  };
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) {
    const double f = spec.peak_force * static_cast<double>(i) / dn;
    add(f, loading(f / spec.area));
  }
  test.phases.push_back({0, test.time.size()});
  for (std::size_t i = 1; i <= n; ++i) {
    const double f = spec.peak_force - (spec.peak_force - spec.min_force) * static_cast<double>(i) / dn;
    add(f, eps_peak - (sigma_peak - f / spec.area) / spec.unloading_modulus);
  }
  test.phases.push_back({test.phases.back().end, test.time.size()});
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / dn;
    add(spec.min_force + (spec.peak_force - spec.min_force) * t,
        eps_min + (eps_reload - eps_min) * std::pow(t, spec.reload_exponent));
  }
  test.phases.push_back({test.phases.back().end, test.time.size()});
  return test;
}

void write_cyclic_csv(const CyclicTest& test, std::ostream& out) {
  out << "# synthetic cyclic tension test\n# phases:";
  for (const auto& r : test.phases) out << ' ' << r.begin << '-' << r.end;
  out << "\ntime_s,force_N,strain\n";
  for (std::size_t i = 0; i < test.time.size(); ++i) {
    out << format_double(test.time[i]) << ',' << format_double(test.force[i]) << ',' << format_double(test.strain[i])
        << '\n';
  }
}

double rope_area(const RopeOptions& options) {
  return std::numbers::pi * 0.25 * options.diameter * options.diameter;
}

double polygon_area(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorCode::kDimensionMismatch, "polygon coordinates differ in length");
  double twice = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t j = (i + 1) % x.size();
    twice += x[i] * y[j] - x[j] * y[i];
  }
  return 0.5 * std::abs(twice);
}

RopeResult run_rope(const Dataset& data, std::span<const IndexRange> ranges, const RopeOptions& options) {
  require(!ranges.empty(), ErrorCode::kConfig, "rope pipeline needs at least one phase");
  const double area = rope_area(options);
  const Structure bar = build_bar(options.length, options.elements, area, BarSupports::kFixedFree, BarLoads{{}, 1.0});
  const auto subsets = split_subsets(data, ranges, options.prepend_origin);

  SolverConfig config = options.config;
  config.alpha = options.alpha;
  // One metric for every phase, so objectives are comparable across phases.
  config.c = objective_weight(options.config, data);
  const double c = *config.c;

  RopeResult result;
  std::optional<WarmStart> start;
  for (std::size_t p = 0; p < subsets.size(); ++p) {
    RopePhase phase{p < options.phase_names.size() ? options.phase_names[p] : "phase-" + std::to_string(p + 1),
                    subsets[p], check_consistency(subsets[p]), {}, start.has_value(), {}, {}, {}};
    if (!phase.data_check.consistent && !options.force) {
      fail(ErrorCode::kConfig, "sub-dataset '" + phase.name + "' is not thermomechanically consistent");
    }
    config.load_factors.clear();
    for (const auto& point : phase.data.points()) config.load_factors.push_back(point.stress * area);
    if (start) start->assignment = local_state_assignment(bar, start->state, phase.data, c);

    phase.record = solve_structure(bar, phase.data, config, options.solver, start);
    std::vector<DataPoint> states;
    const auto tip = static_cast<Eigen::Index>(bar.n_nodes() - 1);
    for (const auto& step : phase.record.steps) {
      phase.forces.push_back(step.load_factor);
      phase.deflections.push_back(step.state.u[tip]);
      for (Eigen::Index i = 0; i < step.state.e.size(); ++i) states.push_back({step.state.e[i], step.state.s[i]});
    }
    if (states.size() >= 2) phase.state_check = check_consistency(states);
    const bool ok = phase.record.completed();
    if (ok) start = WarmStart{phase.record.last().state, phase.record.last().assignment};
    result.phases.push_back(std::move(phase));
    if (!ok) {
      result.completed = false;
      break;
    }
  }

  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t p = 1; p < result.phases.size(); ++p) {
    x.insert(x.end(), result.phases[p].deflections.begin(), result.phases[p].deflections.end());
    y.insert(y.end(), result.phases[p].forces.begin(), result.phases[p].forces.end());
  }
  if (x.size() >= 3) result.hysteresis_area = polygon_area(x, y);
  return result;
}

void write_load_deflection_csv(const RopeResult& result, std::ostream& out) {
  out << "phase,step,force_N,deflection_m,objective\n";
  for (const auto& phase : result.phases) {
    for (std::size_t j = 0; j < phase.forces.size(); ++j) {
      out << phase.name << ',' << j << ',' << format_double(phase.forces[j]) << ','
          << format_double(phase.deflections[j]) << ',' << format_double(phase.record.steps[j].objective) << '\n';
    }
  }
}

}  // namespace ddelast
