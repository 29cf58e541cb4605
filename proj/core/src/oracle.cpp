#include "ddelast/oracle.hpp"

#include <cmath>
#include <limits>

#include "ddelast/errors.hpp"
#include "ddelast/solvers.hpp"

namespace ddelast {

OracleResult enumerate_global(const Structure& structure, const Dataset& data, const SolverConfig& config,
                              const Eigen::VectorXd& load, const OracleOptions& options) {
  config.validate();
  const std::size_t m = structure.n_elements();
  const std::size_t n = data.size();
  const double total = std::pow(static_cast<double>(n), static_cast<double>(m));
  require(total <= options.budget, ErrorCode::kBudgetExceeded,
          "oracle needs " + std::to_string(total) + " assignments, budget is " + std::to_string(options.budget));

  const double c = objective_weight(config, data);
  SolverConfig linear = config;
  linear.alpha = 0;
  const State zero = State::zeros(structure);

  OracleResult result;
  result.best_objective = std::numeric_limits<double>::infinity();
  Assignment current;
  current.indices.assign(m, 0);
  bool found = false;
  for (;;) {
    const auto assigned = assigned_points(current, data);
    try {
      State guess = zero;
      if (options.linear_start && config.alpha != 0) {
        guess = newton_solve(structure, zero, assigned, load, linear, c).state;
      }
      const NewtonResult r = newton_solve(structure, guess, assigned, load, config, c);
      const double obj = global_objective(structure, r.state, assigned, c);
      ++result.n_evaluated;
      if (!found || obj < result.best_objective) {
        found = true;
        result.best_objective = obj;
        result.best_assignment = current;
        result.best_state = r.state;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDiverged && e.code() != ErrorCode::kSingular) throw;
      ++result.n_failed;
    }

    // Odometer over the assignment, last element fastest (lexicographic order).
    std::size_t pos = m;
    while (pos > 0) {
      --pos;
      if (++current.indices[pos] < n) break;
      current.indices[pos] = 0;
      if (pos == 0) {
        pos = m;  // wrapped around
        break;
      }
    }
    if (pos == m) break;
  }
  require(found, ErrorCode::kAllFailed, "no assignment produced a converged state");
  return result;
}

}  // namespace ddelast
