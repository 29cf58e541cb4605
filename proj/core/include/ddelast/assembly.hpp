#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ddelast/dataset.hpp"
#include "ddelast/structure.hpp"

namespace ddelast {

/// Primal-dual unknowns of the discretised problem. `u` and `lambda` are full nodal
/// vectors (length n_dofs, constrained entries stay zero); `e`, `s`, `mu` hold one
/// value per element.
struct State {
  Eigen::VectorXd u;
  Eigen::VectorXd e;
  Eigen::VectorXd s;
  Eigen::VectorXd mu;
  Eigen::VectorXd lambda;

  static State zeros(const Structure& structure);
};

/// Per-element index into a Dataset (0-based).
struct Assignment {
  std::vector<std::size_t> indices;

  friend bool operator==(const Assignment&, const Assignment&) = default;
  std::size_t size() const noexcept { return indices.size(); }
};

enum class InitMode { kRandom, kStressFree, kStructureSpecific };

struct SolverConfig {
  int alpha = 0;               ///< 0: linear strain, 1: Green-Lagrange-type quadratic strain
  std::optional<double> c;     ///< objective weight (Pa); defaults to the dataset's least-squares modulus
  double beta_s = 1e-5;        ///< row/column scaling factor of the KKT system
  double newton_tol = 1e-9;    ///< on the scaled Newton increment, relative to 1 + |scaled unknowns|
  int newton_max_iters = 50;
  int adm_max_iters = 200;
  int k_max = 100;             ///< greedy search budget per load step
  std::vector<double> load_factors{1.0};
  InitMode init_mode = InitMode::kStructureSpecific;
  std::uint64_t seed = 0;      ///< for InitMode::kRandom

  void validate() const;
};

/// Resolved c: the configured value or the least-squares modulus of `data`.
double objective_weight(const SolverConfig& config, const Dataset& data);

/// u' = (u_b - u_a) / L of element `i` (second component is zero in 1D).
Eigen::Vector2d displacement_gradient(const Structure& structure, std::size_t i, const Eigen::VectorXd& u);

/// eps = t . u' + alpha/2 u' . u'
double strain(const Structure& structure, std::size_t element, const Eigen::VectorXd& u, int alpha);

/// L_e [ c/2 (e - e~)^2 + 1/(2c) (s - s~)^2 ]
double element_objective(const DataPoint& state, const DataPoint& data, double c, double length);

double global_objective(const Structure& structure, const State& state, std::span<const DataPoint> assigned, double c);
double global_objective(const Structure& structure, const State& state, const Assignment& assignment,
                        const Dataset& data, double c);

/// Data points selected by `assignment`, one per element.
std::vector<DataPoint> assigned_points(const Assignment& assignment, const Dataset& data);

/// Block layout of the reduced unknown vector [u_free, e, s, mu, lambda_free].
struct DofMap {
  std::vector<std::size_t> free_dofs;
  Eigen::Index n_free = 0;
  Eigen::Index n_elements = 0;

  Eigen::Index u_offset() const { return 0; }
  Eigen::Index e_offset() const { return n_free; }
  Eigen::Index s_offset() const { return n_free + n_elements; }
  Eigen::Index mu_offset() const { return n_free + 2 * n_elements; }
  Eigen::Index lambda_offset() const { return n_free + 3 * n_elements; }
  Eigen::Index size() const { return 2 * n_free + 3 * n_elements; }

  static DofMap of(const Structure& structure);
};

Eigen::VectorXd pack(const DofMap& map, const State& state);
/// Writes the reduced vector back into `state`; constrained nodal entries are left untouched.
void unpack(const DofMap& map, const Eigen::VectorXd& q, State& state);

struct KktParams {
  int alpha = 0;
  double c = 1.0;
  double beta_s = 1.0;
};

/// Scaled saddle-point system A z = b for one Newton step.
///
/// With J the Jacobian of the stationarity residual g and R, C the diagonal
/// matrices `row_scale`, `col_scale`, the stored system is A = R J C^-1, b = -R g.
/// The unknown is z = C dq: the stress and multiplier increments enter as beta_s * ds
/// and beta_s * dmu, and the displacement, strain and equilibrium rows are multiplied
/// by beta_s. beta_s = 1 gives the unscaled system.
struct KktSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  Eigen::VectorXd row_scale;
  Eigen::VectorXd col_scale;
  DofMap dof_map;
};

/// Stationarity residual g(q) of the Lagrangian, reduced to free DOFs and unscaled.
/// `load` is the full external load vector (length n_dofs).
Eigen::VectorXd kkt_residual(const Structure& structure, const State& state, std::span<const DataPoint> assigned,
                             const Eigen::VectorXd& load, const KktParams& params);

KktSystem assemble_kkt(const Structure& structure, const State& state, std::span<const DataPoint> assigned,
                       const Eigen::VectorXd& load, const KktParams& params);

}  // namespace ddelast
