#include "ddelast/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>

namespace ddelast {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Element distance without the length factor, which is common to all candidates.
double metric(const DataPoint& a, const DataPoint& b, double c) { return element_objective(a, b, c, 1.0); }

DataPoint element_state(const State& state, std::size_t i) {
  const auto ii = static_cast<Eigen::Index>(i);
  return {state.e[ii], state.s[ii]};
}

void check_assignment(const Structure& structure, const Assignment& assignment, const Dataset& data) {
  require(assignment.size() == structure.n_elements(), ErrorCode::kDimensionMismatch,
          "assignment length differs from element count");
  for (auto idx : assignment.indices) {
    require(idx < data.size(), ErrorCode::kInvalidArgument, "assignment index outside the dataset");
  }
}

// Uniform integer in [0, n) by rejection sampling; std::uniform_int_distribution is
// implementation-defined and would make seeded runs differ between standard libraries.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const auto bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r < limit) return static_cast<std::size_t>(r % bound);
  }
}

}  // namespace

std::size_t nearest_point(const DataPoint& point, const Dataset& data, double c) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < data.size(); ++j) {
    const double d = metric(point, data[j], c);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

std::pair<std::size_t, std::optional<std::size_t>> two_nearest_points(const DataPoint& point, const Dataset& data,
                                                                     double c) {
  const double inf = std::numeric_limits<double>::infinity();
  std::size_t first = 0;
  std::optional<std::size_t> second;
  double d1 = inf;
  double d2 = inf;
  for (std::size_t j = 0; j < data.size(); ++j) {
    const double d = metric(point, data[j], c);
    if (d < d1) {
      if (j > 0) {
        second = first;
        d2 = d1;
      }
      first = j;
      d1 = d;
    } else if (d < d2 || !second) {
      second = j;
      d2 = d;
    }
  }
  return {first, second};
}

Assignment local_state_assignment(const Structure& structure, const State& state, const Dataset& data, double c) {
  Assignment out;
  out.indices.reserve(structure.n_elements());
  for (std::size_t i = 0; i < structure.n_elements(); ++i) {
    out.indices.push_back(nearest_point(element_state(state, i), data, c));
  }
  return out;
}

SolveResult adm_solve(const Structure& structure, const State& guess, const Assignment& initial, const Dataset& data,
                      const Eigen::VectorXd& load, const SolverConfig& config, double c) {
  check_assignment(structure, initial, data);
  SolveResult result;
  Assignment current = initial;
  for (int it = 1; it <= config.adm_max_iters; ++it) {
    const auto assigned = assigned_points(current, data);
    NewtonResult newton = newton_solve(structure, guess, assigned, load, config, c, &result.stats);
    ++result.stats.adm_iterations;
    Assignment next = local_state_assignment(structure, newton.state, data, c);
    if (next == current) {
      result.state = std::move(newton.state);
      result.assignment = std::move(current);
      result.objective = global_objective(structure, result.state, assigned, c);
      result.committed_objectives.push_back(result.objective);
      return result;
    }
    current = std::move(next);
  }
  fail(ErrorCode::kNoConvergence,
       "ADM assignment did not settle within " + std::to_string(config.adm_max_iters) + " iterations");
}

SolveResult go_adm_solve(const Structure& structure, const State& guess, const Assignment& initial,
                         const Dataset& data, const Eigen::VectorXd& load, const SolverConfig& config, double c) {
  SolveResult best = adm_solve(structure, guess, initial, data, load, config, c);
  SolveStats stats = best.stats;
  std::vector<double> committed{best.objective};
  const auto start = std::chrono::steady_clock::now();
  const std::size_t m = structure.n_elements();

  int k = 0;
  while (k < config.k_max) {
    std::vector<double> element_obj(m);
    for (std::size_t i = 0; i < m; ++i) {
      element_obj[i] = element_objective(element_state(best.state, i), data[best.assignment.indices[i]], c,
                                         structure.element(i).length);
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return element_obj[a] > element_obj[b]; });

    bool committed_this_pass = false;
    for (std::size_t i : order) {
      if (k >= config.k_max) break;
      ++k;
      const auto [first, second] = two_nearest_points(element_state(best.state, i), data, c);
      std::optional<std::size_t> alternative;
      if (first != best.assignment.indices[i]) {
        alternative = first;
      } else {
        alternative = second;
      }
      if (!alternative) continue;

      Assignment trial = best.assignment;
      trial.indices[i] = *alternative;
      try {
        SolveResult candidate = adm_solve(structure, guess, trial, data, load, config, c);
        stats += candidate.stats;
        if (candidate.objective < best.objective) {
          best.state = std::move(candidate.state);
          best.assignment = std::move(candidate.assignment);
          best.objective = candidate.objective;
          committed.push_back(best.objective);
          committed_this_pass = true;
          break;
        }
      } catch (const Error&) {
        ++stats.greedy_failures;
      }
    }
    // A pass without a commit leaves the state unchanged, so a further pass would repeat it.
    if (!committed_this_pass) break;
  }

  stats.greedy_searches = k;
  stats.greedy_seconds = seconds_since(start);
  best.stats = stats;
  best.improved = committed.size() > 1;
  best.committed_objectives = std::move(committed);
  return best;
}

Eigen::VectorXd equilibrium_stress(const Structure& structure, const Eigen::VectorXd& load) {
  const DofMap map = DofMap::of(structure);
  std::vector<Eigen::Index> pos(structure.n_dofs(), -1);
  for (Eigen::Index i = 0; i < map.n_free; ++i) pos[map.free_dofs[static_cast<std::size_t>(i)]] = i;

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(map.n_free, map.n_elements);
  for (std::size_t e = 0; e < structure.n_elements(); ++e) {
    const auto& el = structure.element(e);
    for (int a = 0; a < 2; ++a) {
      for (int k = 0; k < structure.dim(); ++k) {
        const Eigen::Index row = pos[structure.dof(el.nodes[static_cast<std::size_t>(a)], k)];
        if (row >= 0) h(row, static_cast<Eigen::Index>(e)) += (a == 0 ? -1.0 : 1.0) * el.area * el.tangent[k];
      }
    }
  }
  Eigen::VectorXd f(map.n_free);
  for (Eigen::Index i = 0; i < map.n_free; ++i) f[i] = load[static_cast<Eigen::Index>(map.free_dofs[static_cast<std::size_t>(i)])];
  for (Eigen::Index i = 0; i < map.n_free; ++i) {
    require(!(h.row(i).isZero(0.0) && f[i] != 0.0), ErrorCode::kIllPosed,
            "a loaded degree of freedom is not connected to any member direction");
  }
  return h.completeOrthogonalDecomposition().solve(f);
}

Assignment initialize_data(const Structure& structure, const Dataset& data, const SolverConfig& config, double c,
                           const Eigen::VectorXd& load, std::string* warning) {
  const std::size_t m = structure.n_elements();
  Assignment out;
  out.indices.resize(m);
  switch (config.init_mode) {
    case InitMode::kRandom: {
      std::mt19937_64 rng(config.seed);
      for (auto& idx : out.indices) idx = uniform_index(rng, data.size());
      break;
    }
    case InitMode::kStressFree: {
      std::size_t idx = 0;
      if (auto origin = data.origin_index()) {
        idx = *origin;
      } else {
        idx = nearest_point({0.0, 0.0}, data, c);
        if (warning) *warning = "dataset has no (0, 0) point; stress-free start uses index " + std::to_string(idx);
      }
      std::fill(out.indices.begin(), out.indices.end(), idx);
      break;
    }
    case InitMode::kStructureSpecific: {
      const Eigen::VectorXd s = equilibrium_stress(structure, load);
      for (std::size_t i = 0; i < m; ++i) {
        const double si = s[static_cast<Eigen::Index>(i)];
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < data.size(); ++j) {
          const double ds = si - data[j].stress;
          const double d = 0.5 / c * ds * ds;
          if (d < best_d) {
            best_d = d;
            best = j;
          }
        }
        out.indices[i] = best;
      }
      break;
    }
  }
  return out;
}

Eigen::MatrixXi to_one_hot(const Assignment& assignment, std::size_t n_points) {
  Eigen::MatrixXi t = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(assignment.size()),
                                            static_cast<Eigen::Index>(n_points));
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    require(assignment.indices[i] < n_points, ErrorCode::kInvalidArgument, "assignment index outside the dataset");
    t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(assignment.indices[i])) = 1;
  }
  return t;
}

Assignment from_one_hot(const Eigen::MatrixXi& t) {
  Assignment out;
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    std::optional<std::size_t> hit;
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      const int v = t(i, j);
      require(v == 0 || v == 1, ErrorCode::kInvalidArgument, "selection matrix entries must be 0 or 1");
      if (v == 1) {
        require(!hit, ErrorCode::kInvalidArgument, "selection matrix row has more than one 1");
        hit = static_cast<std::size_t>(j);
      }
    }
    require(hit.has_value(), ErrorCode::kInvalidArgument, "selection matrix row has no 1");
    out.indices.push_back(*hit);
  }
  return out;
}

std::string to_string(SolverKind kind) { return kind == SolverKind::kAdm ? "adm" : "go-adm"; }

std::string to_string(InitMode mode) {
  switch (mode) {
    case InitMode::kRandom: return "random";
    case InitMode::kStressFree: return "stress-free";
    case InitMode::kStructureSpecific: return "structure-specific";
  }
  return "unknown";
}

RunRecord solve_structure(const Structure& structure, const Dataset& data, const SolverConfig& config,
                          SolverKind kind, const std::optional<WarmStart>& start) {
  config.validate();
  RunRecord record;
  record.solver = kind;
  record.config = config;
  record.c = objective_weight(config, data);
  const double c = record.c;

  State state = start ? start->state : State::zeros(structure);
  Assignment assignment;
  std::size_t step = 0;
  try {
    if (start) {
      check_assignment(structure, start->assignment, data);
      assignment = start->assignment;
    } else {
      std::string warning;
      assignment = initialize_data(structure, data, config, c,
                                   config.load_factors.front() * structure.reference_load(), &warning);
      if (!warning.empty()) record.warnings.push_back(warning);
    }
    for (; step < config.load_factors.size(); ++step) {
      const double gamma = config.load_factors[step];
      const Eigen::VectorXd load = gamma * structure.reference_load();
      const auto t0 = std::chrono::steady_clock::now();
      SolveResult r = kind == SolverKind::kAdm ? adm_solve(structure, state, assignment, data, load, config, c)
                                               : go_adm_solve(structure, state, assignment, data, load, config, c);
      StepRecord rec;
      rec.load_factor = gamma;
      rec.state = r.state;
      rec.assignment = r.assignment;
      rec.objective = r.objective;
      rec.stats = r.stats;
      rec.committed_objectives = std::move(r.committed_objectives);
      rec.improved = r.improved;
      rec.wall_seconds = seconds_since(t0);
      record.steps.push_back(std::move(rec));
      state = std::move(r.state);
      assignment = std::move(r.assignment);
    }
  } catch (const Error& e) {
    record.failure = RunFailure{e.code(), e.what(), step};
  }
  return record;
}

}  // namespace ddelast
