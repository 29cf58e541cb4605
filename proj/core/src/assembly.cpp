#include "ddelast/assembly.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "ddelast/errors.hpp"

namespace ddelast {

State State::zeros(const Structure& structure) {
  const auto n = static_cast<Eigen::Index>(structure.n_dofs());
  const auto m = static_cast<Eigen::Index>(structure.n_elements());
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m),
          Eigen::VectorXd::Zero(n)};
}

void SolverConfig::validate() const {
  require(alpha == 0 || alpha == 1, ErrorCode::kConfig, "alpha must be 0 or 1");
  require(!c || (*c > 0.0 && std::isfinite(*c)), ErrorCode::kConfig, "c must be positive");
  require(beta_s > 0.0 && std::isfinite(beta_s), ErrorCode::kConfig, "beta_s must be positive");
  require(newton_tol > 0.0, ErrorCode::kConfig, "newton_tol must be positive");
  require(newton_max_iters > 0 && adm_max_iters > 0, ErrorCode::kConfig, "iteration limits must be positive");
  require(k_max >= 0, ErrorCode::kConfig, "k_max must be non-negative");
  require(!load_factors.empty(), ErrorCode::kConfig, "load_factors must not be empty");
}

double objective_weight(const SolverConfig& config, const Dataset& data) {
  return config.c ? *config.c : least_squares_modulus(data);
}

Eigen::Vector2d displacement_gradient(const Structure& structure, std::size_t i, const Eigen::VectorXd& u) {
  const auto& el = structure.element(i);
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  for (int k = 0; k < structure.dim(); ++k) {
    grad[k] = (u[static_cast<Eigen::Index>(structure.dof(el.nodes[1], k))] -
               u[static_cast<Eigen::Index>(structure.dof(el.nodes[0], k))]) /
              el.length;
  }
  return grad;
}

double strain(const Structure& structure, std::size_t element, const Eigen::VectorXd& u, int alpha) {
  const Eigen::Vector2d du = displacement_gradient(structure, element, u);
  return structure.element(element).tangent.dot(du) + 0.5 * alpha * du.squaredNorm();
}

double element_objective(const DataPoint& state, const DataPoint& data, double c, double length) {
  const double de = state.strain - data.strain;
  const double ds = state.stress - data.stress;
  return length * (0.5 * c * de * de + 0.5 / c * ds * ds);
}

double global_objective(const Structure& structure, const State& state, std::span<const DataPoint> assigned, double c) {
  require(assigned.size() == structure.n_elements(), ErrorCode::kDimensionMismatch,
          "assignment length differs from element count");
  double total = 0.0;
  for (std::size_t i = 0; i < assigned.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    total += element_objective({state.e[ii], state.s[ii]}, assigned[i], c, structure.element(i).length);
  }
  return total;
}

std::vector<DataPoint> assigned_points(const Assignment& assignment, const Dataset& data) {
  std::vector<DataPoint> out;
  out.reserve(assignment.size());
  for (auto idx : assignment.indices) {
    require(idx < data.size(), ErrorCode::kInvalidArgument, "assignment index outside the dataset");
    out.push_back(data[idx]);
  }
  return out;
}

double global_objective(const Structure& structure, const State& state, const Assignment& assignment,
                        const Dataset& data, double c) {
  return global_objective(structure, state, assigned_points(assignment, data), c);
}

DofMap DofMap::of(const Structure& structure) {
  DofMap map;
  map.free_dofs = structure.free_dofs();
  map.n_free = static_cast<Eigen::Index>(map.free_dofs.size());
  map.n_elements = static_cast<Eigen::Index>(structure.n_elements());
  return map;
}

Eigen::VectorXd pack(const DofMap& map, const State& state) {
  Eigen::VectorXd q(map.size());
  for (Eigen::Index i = 0; i < map.n_free; ++i) {
    const auto d = static_cast<Eigen::Index>(map.free_dofs[static_cast<std::size_t>(i)]);
    q[map.u_offset() + i] = state.u[d];
    q[map.lambda_offset() + i] = state.lambda[d];
  }
  q.segment(map.e_offset(), map.n_elements) = state.e;
  q.segment(map.s_offset(), map.n_elements) = state.s;
  q.segment(map.mu_offset(), map.n_elements) = state.mu;
  return q;
}

void unpack(const DofMap& map, const Eigen::VectorXd& q, State& state) {
  for (Eigen::Index i = 0; i < map.n_free; ++i) {
    const auto d = static_cast<Eigen::Index>(map.free_dofs[static_cast<std::size_t>(i)]);
    state.u[d] = q[map.u_offset() + i];
    state.lambda[d] = q[map.lambda_offset() + i];
  }
  state.e = q.segment(map.e_offset(), map.n_elements);
  state.s = q.segment(map.s_offset(), map.n_elements);
  state.mu = q.segment(map.mu_offset(), map.n_elements);
}

namespace {

void check_dimensions(const Structure& structure, const State& state, std::span<const DataPoint> assigned,
                      const Eigen::VectorXd& load) {
  const auto n = static_cast<Eigen::Index>(structure.n_dofs());
  const auto m = static_cast<Eigen::Index>(structure.n_elements());
  require(state.u.size() == n && state.lambda.size() == n && state.e.size() == m && state.s.size() == m &&
              state.mu.size() == m,
          ErrorCode::kDimensionMismatch, "state dimensions do not match the structure");
  require(static_cast<Eigen::Index>(assigned.size()) == m, ErrorCode::kDimensionMismatch,
          "assignment length differs from element count");
  require(load.size() == n, ErrorCode::kDimensionMismatch, "load vector length differs from DOF count");
}

// Reduced row of every nodal DOF, -1 when constrained.
std::vector<Eigen::Index> reduced_positions(const Structure& structure, const DofMap& map) {
  std::vector<Eigen::Index> pos(structure.n_dofs(), -1);
  for (Eigen::Index i = 0; i < map.n_free; ++i) pos[map.free_dofs[static_cast<std::size_t>(i)]] = i;
  return pos;
}

// Local DOF l of element `el` (node-major, 2*dim entries) and the sign of its
// shape-function derivative: -1 for the first node, +1 for the second.
struct LocalDof {
  Eigen::Index reduced;
  int component;
  double sign;
};

std::array<LocalDof, 4> local_dofs(const Structure& structure, const Element& el,
                                   const std::vector<Eigen::Index>& pos) {
  std::array<LocalDof, 4> out{};
  int slot = 0;
  for (int a = 0; a < 2; ++a) {
    for (int k = 0; k < structure.dim(); ++k) {
      out[static_cast<std::size_t>(slot++)] = {pos[structure.dof(el.nodes[static_cast<std::size_t>(a)], k)], k,
                                               a == 0 ? -1.0 : 1.0};
    }
  }
  return out;
}

}  // namespace

Eigen::VectorXd kkt_residual(const Structure& structure, const State& state, std::span<const DataPoint> assigned,
                             const Eigen::VectorXd& load, const KktParams& params) {
  check_dimensions(structure, state, assigned, load);
  const DofMap map = DofMap::of(structure);
  const auto pos = reduced_positions(structure, map);
  const double alpha = params.alpha;
  const double c = params.c;
  const int n_local = 2 * structure.dim();

  Eigen::VectorXd g = Eigen::VectorXd::Zero(map.size());
  for (std::size_t i = 0; i < structure.n_elements(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto& el = structure.element(i);
    const double len = el.length;
    const double area = el.area;
    const Eigen::Vector2d du = displacement_gradient(structure, i, state.u);
    const Eigen::Vector2d dlambda = displacement_gradient(structure, i, state.lambda);
    const Eigen::Vector2d a = el.tangent + alpha * du;
    const double eps = el.tangent.dot(du) + 0.5 * alpha * du.squaredNorm();
    const double e = state.e[ii];
    const double s = state.s[ii];
    const double mu = state.mu[ii];

    const auto dofs = local_dofs(structure, el, pos);
    for (int l = 0; l < n_local; ++l) {
      const auto& d = dofs[static_cast<std::size_t>(l)];
      if (d.reduced < 0) continue;
      g[map.u_offset() + d.reduced] += d.sign * (mu * a[d.component] + alpha * area * s * dlambda[d.component]);
      g[map.lambda_offset() + d.reduced] += d.sign * area * s * a[d.component];
    }
    g[map.e_offset() + ii] = len * (c * (e - assigned[i].strain) - mu);
    g[map.s_offset() + ii] = len * ((s - assigned[i].stress) / c + area * a.dot(dlambda));
    g[map.mu_offset() + ii] = len * (eps - e);
  }
  for (Eigen::Index i = 0; i < map.n_free; ++i) {
    g[map.lambda_offset() + i] -= load[static_cast<Eigen::Index>(map.free_dofs[static_cast<std::size_t>(i)])];
  }
  return g;
}

KktSystem assemble_kkt(const Structure& structure, const State& state, std::span<const DataPoint> assigned,
                       const Eigen::VectorXd& load, const KktParams& params) {
  check_dimensions(structure, state, assigned, load);
  KktSystem sys;
  sys.dof_map = DofMap::of(structure);
  const DofMap& map = sys.dof_map;
  const auto pos = reduced_positions(structure, map);
  const double alpha = params.alpha;
  const double c = params.c;
  const int n_local = 2 * structure.dim();

  Eigen::MatrixXd& jac = sys.matrix;
  jac = Eigen::MatrixXd::Zero(map.size(), map.size());
  for (std::size_t i = 0; i < structure.n_elements(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto& el = structure.element(i);
    const double len = el.length;
    const double area = el.area;
    const Eigen::Vector2d du = displacement_gradient(structure, i, state.u);
    const Eigen::Vector2d dlambda = displacement_gradient(structure, i, state.lambda);
    const Eigen::Vector2d a = el.tangent + alpha * du;
    const double s = state.s[ii];
    const double mu = state.mu[ii];
    const Eigen::Index row_e = map.e_offset() + ii;
    const Eigen::Index row_s = map.s_offset() + ii;
    const Eigen::Index row_mu = map.mu_offset() + ii;

    jac(row_e, row_e) += c * len;
    jac(row_e, row_mu) -= len;
    jac(row_mu, row_e) -= len;
    jac(row_s, row_s) += len / c;

    const auto dofs = local_dofs(structure, el, pos);
    for (int l = 0; l < n_local; ++l) {
      const auto& dl = dofs[static_cast<std::size_t>(l)];
      if (dl.reduced < 0) continue;
      const Eigen::Index ru = map.u_offset() + dl.reduced;
      const Eigen::Index rl = map.lambda_offset() + dl.reduced;
      const double b = dl.sign * a[dl.component];  // L * (G^T a)_l

      jac(ru, row_mu) += b;
      jac(row_mu, ru) += b;
      jac(rl, row_s) += area * b;
      jac(row_s, rl) += area * b;
      if (alpha != 0.0) {
        const double b1_lambda = alpha * area * dl.sign * dlambda[dl.component];
        jac(ru, row_s) += b1_lambda;
        jac(row_s, ru) += b1_lambda;
      }
      if (alpha == 0.0) continue;
      for (int k = 0; k < n_local; ++k) {
        const auto& dk = dofs[static_cast<std::size_t>(k)];
        if (dk.reduced < 0 || dk.component != dl.component) continue;
        // L * (G^T G)_{lk} = sign_l * sign_k / L for matching components
        const double gg = dl.sign * dk.sign / len;
        const Eigen::Index cu = map.u_offset() + dk.reduced;
        const Eigen::Index cl = map.lambda_offset() + dk.reduced;
        jac(ru, cu) += alpha * mu * gg;
        jac(ru, cl) += alpha * area * s * gg;
        jac(rl, cu) += alpha * area * s * gg;
      }
    }
  }

  const Eigen::Index n = map.size();
  sys.row_scale = Eigen::VectorXd::Ones(n);
  sys.col_scale = Eigen::VectorXd::Ones(n);
  const double beta = params.beta_s;
  sys.row_scale.segment(map.u_offset(), map.n_free).setConstant(beta);
  sys.row_scale.segment(map.e_offset(), map.n_elements).setConstant(beta);
  sys.row_scale.segment(map.lambda_offset(), map.n_free).setConstant(beta);
  sys.col_scale.segment(map.s_offset(), map.n_elements).setConstant(beta);
  sys.col_scale.segment(map.mu_offset(), map.n_elements).setConstant(beta);

  sys.rhs = -sys.row_scale.cwiseProduct(kkt_residual(structure, state, assigned, load, params));
  if (beta != 1.0) {
    jac = sys.row_scale.asDiagonal() * jac * sys.col_scale.cwiseInverse().asDiagonal();
  }
  return sys;
}

}  // namespace ddelast
