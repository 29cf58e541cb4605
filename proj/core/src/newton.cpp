#include <chrono>
#include <cmath>

#include <Eigen/Dense>

#include "ddelast/solvers.hpp"

namespace ddelast {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

SolveStats& SolveStats::operator+=(const SolveStats& other) {
  newton_iterations += other.newton_iterations;
  adm_iterations += other.adm_iterations;
  greedy_searches += other.greedy_searches;
  greedy_failures += other.greedy_failures;
  assembly_seconds += other.assembly_seconds;
  linear_solve_seconds += other.linear_solve_seconds;
  greedy_seconds += other.greedy_seconds;
  return *this;
}

NewtonResult newton_solve(const Structure& structure, const State& guess, std::span<const DataPoint> assigned,
                          const Eigen::VectorXd& load, const SolverConfig& config, double c, SolveStats* stats) {
  const KktParams params{config.alpha, c, config.beta_s};
  NewtonResult result;
  result.state = guess;
  State& state = result.state;
  const DofMap map = DofMap::of(structure);
  Eigen::VectorXd q = pack(map, state);

  double first_step = 0.0;
  for (int it = 1;; ++it) {
    if (it > config.newton_max_iters) {
      fail(ErrorCode::kDiverged, "Newton did not converge within " + std::to_string(config.newton_max_iters) +
                                     " iterations");
    }
    auto t0 = std::chrono::steady_clock::now();
    const KktSystem sys = assemble_kkt(structure, state, assigned, load, params);
    if (it == 1) result.initial_residual = (sys.rhs.array() / sys.row_scale.array()).matrix().norm();
    if (stats) stats->assembly_seconds += seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.matrix);
    const auto& packed = lu.matrixLU();
    for (Eigen::Index i = 0; i < packed.rows(); ++i) {
      if (packed(i, i) == 0.0) fail(ErrorCode::kSingular, "KKT matrix has a zero pivot");
    }
    const Eigen::VectorXd z = lu.solve(sys.rhs);
    if (stats) {
      stats->linear_solve_seconds += seconds_since(t0);
      ++stats->newton_iterations;
    }
    if (!z.allFinite()) fail(ErrorCode::kSingular, "KKT solve produced non-finite values");

    q += z.cwiseQuotient(sys.col_scale);
    unpack(map, q, state);
    result.iterations = it;
    const double step = z.norm();
    result.step_norms.push_back(step);
    if (!q.allFinite()) fail(ErrorCode::kDiverged, "Newton iterate became non-finite");
    if (it == 1) {
      first_step = step;
    } else if (step > 1e6 * first_step) {
      fail(ErrorCode::kDiverged, "Newton increment grew by more than 1e6");
    }

    // With linear strains the residual is affine in q: one solve is exact.
    if (config.alpha == 0) break;
    if (step <= config.newton_tol * (1.0 + q.cwiseProduct(sys.col_scale).norm())) break;
  }
  result.final_residual = kkt_residual(structure, state, assigned, load, params).norm();
  return result;
}

}  // namespace ddelast
