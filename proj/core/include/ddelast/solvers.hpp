#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ddelast/assembly.hpp"
#include "ddelast/dataset.hpp"
#include "ddelast/errors.hpp"
#include "ddelast/structure.hpp"

namespace ddelast {

/// Work counters and wall times accumulated by a solve. Times are in seconds.
struct SolveStats {
  int newton_iterations = 0;  ///< linear solves, summed over all ADM iterations and greedy trials
  int adm_iterations = 0;     ///< Newton solve + reassignment rounds
  int greedy_searches = 0;    ///< k: attempted greedy trials, failed ones included
  int greedy_failures = 0;    ///< trials whose ADM run raised an error
  double assembly_seconds = 0.0;
  double linear_solve_seconds = 0.0;
  double greedy_seconds = 0.0;

  SolveStats& operator+=(const SolveStats& other);
};

struct NewtonResult {
  State state;
  int iterations = 0;
  std::vector<double> step_norms;  ///< |z| of every scaled increment
  double initial_residual = 0.0;   ///< |g| at the guess
  double final_residual = 0.0;     ///< |g| at the returned state
};

/// Newton-Raphson on the stationarity conditions with the data points fixed.
///
/// Stops once the scaled increment satisfies |z| <= newton_tol * (1 + |C q|), where C q
/// are the scaled unknowns; with alpha = 0 the residual is affine and a single solve is
/// exact. Throws kDiverged (iteration limit, non-finite values, or an increment more than
/// 1e6 times the first one) and kSingular (zero pivot).
NewtonResult newton_solve(const Structure& structure, const State& guess, std::span<const DataPoint> assigned,
                          const Eigen::VectorXd& load, const SolverConfig& config, double c,
                          SolveStats* stats = nullptr);

/// Index of the data point closest to `point` under the element metric; ties go to the lower index.
std::size_t nearest_point(const DataPoint& point, const Dataset& data, double c);

/// Closest and second-closest data indices (second is empty for a one-point dataset).
std::pair<std::size_t, std::optional<std::size_t>> two_nearest_points(const DataPoint& point, const Dataset& data,
                                                                     double c);

/// Per element, the nearest data point to the current (e, s).
Assignment local_state_assignment(const Structure& structure, const State& state, const Dataset& data, double c);

struct SolveResult {
  State state;
  Assignment assignment;
  double objective = 0.0;
  SolveStats stats;
  /// Objective after plain ADM followed by every committed greedy improvement.
  std::vector<double> committed_objectives;
  bool improved = false;  ///< true when the greedy loop committed at least once
};

/// Alternates Newton solves (always started from `guess`) with local reassignment until the
/// assignment repeats. Throws kNoConvergence after adm_max_iters rounds.
SolveResult adm_solve(const Structure& structure, const State& guess, const Assignment& initial, const Dataset& data,
                      const Eigen::VectorXd& load, const SolverConfig& config, double c);

/// ADM followed by greedy single-element swaps that are kept only when they lower the
/// global objective. At most k_max trials are attempted; a trial whose ADM run fails is
/// counted and discarded.
SolveResult go_adm_solve(const Structure& structure, const State& guess, const Assignment& initial,
                         const Dataset& data, const Eigen::VectorXd& load, const SolverConfig& config, double c);

/// Stress field of the linear equilibrium equations H s = f (free DOFs only, H evaluated in the
/// reference configuration), minimum-norm when the structure is statically indeterminate.
Eigen::VectorXd equilibrium_stress(const Structure& structure, const Eigen::VectorXd& load);

/// Initial assignment according to config.init_mode. `load` is used by the structure-specific
/// mode only. When the stress-free mode finds no exact origin it uses the point nearest to it
/// and stores a message in `warning` (if given).
Assignment initialize_data(const Structure& structure, const Dataset& data, const SolverConfig& config, double c,
                           const Eigen::VectorXd& load, std::string* warning = nullptr);

/// Binary selection matrix t (elements x data points) with a single 1 per row.
Eigen::MatrixXi to_one_hot(const Assignment& assignment, std::size_t n_points);
Assignment from_one_hot(const Eigen::MatrixXi& t);

enum class SolverKind { kAdm, kGoAdm };

std::string to_string(SolverKind kind);
std::string to_string(InitMode mode);

struct StepRecord {
  double load_factor = 0.0;
  State state;
  Assignment assignment;
  double objective = 0.0;
  SolveStats stats;
  std::vector<double> committed_objectives;
  bool improved = false;
  double wall_seconds = 0.0;
};

struct RunFailure {
  ErrorCode code = ErrorCode::kDiverged;
  std::string message;
  std::size_t step = 0;  ///< index of the load step that failed
};

struct RunRecord {
  SolverKind solver = SolverKind::kAdm;
  SolverConfig config;
  double c = 0.0;
  std::vector<std::string> warnings;
  std::vector<StepRecord> steps;
  std::optional<RunFailure> failure;

  bool completed() const noexcept { return !failure.has_value(); }
  const StepRecord& last() const { return steps.back(); }
};

/// Starting point of a run that continues from an earlier one.
struct WarmStart {
  State state;
  Assignment assignment;
};

/// Load-stepping driver: step j applies load_factors[j] times the structure's reference load,
/// starting from the previous step's converged state and assignment. The first step starts
/// from the zero state and initialize_data, or from `start` when given (its assignment is
/// then used as is). A failing step ends the run; completed steps are kept in the record.
RunRecord solve_structure(const Structure& structure, const Dataset& data, const SolverConfig& config,
                          SolverKind kind, const std::optional<WarmStart>& start = std::nullopt);

}  // namespace ddelast
