#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "ddelast/assembly.hpp"
#include "ddelast/dataset.hpp"
#include "ddelast/structure.hpp"

namespace ddelast {

struct OracleOptions {
  double budget = 1e6;  ///< maximum number of assignments n_D^m
  /// Start each fixed-data Newton solve from the alpha = 0 solution for the same
  /// assignment instead of the zero state.
  bool linear_start = false;
};

struct OracleResult {
  Assignment best_assignment;
  State best_state;
  double best_objective = 0.0;
  std::size_t n_evaluated = 0;  ///< assignments whose Newton solve converged
  std::size_t n_failed = 0;
};

/// Exhaustive search over all n_D^m assignments: each one is solved with the data fixed
/// and the lowest global objective wins. Equal objectives keep the lexicographically
/// smallest assignment. Only Newton-converged assignments take part in the minimum.
/// Throws kBudgetExceeded before doing any work when n_D^m > budget, kAllFailed when no
/// assignment converges.
OracleResult enumerate_global(const Structure& structure, const Dataset& data, const SolverConfig& config,
                              const Eigen::VectorXd& load, const OracleOptions& options = {});

}  // namespace ddelast
