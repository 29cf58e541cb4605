#pragma once

// Independent reference for the stationarity conditions: the Lagrangian is coded
// directly from element kinematics, and derivatives are taken by central differences.

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ddelast/assembly.hpp"

namespace ddelast::testing {

/// Full Lagrangian of the data-driven problem for a fixed data assignment.
inline double reference_lagrangian(const Structure& st, const State& q, std::span<const DataPoint> data,
                                   const Eigen::VectorXd& load, int alpha, double c) {
  double value = 0.0;
  for (std::size_t i = 0; i < st.n_elements(); ++i) {
    const auto& el = st.element(i);
    const Eigen::Vector2d xa = st.nodes()[el.nodes[0]];
    const Eigen::Vector2d xb = st.nodes()[el.nodes[1]];
    const double len = (xb - xa).norm();
    const Eigen::Vector2d t = (xb - xa) / len;
    Eigen::Vector2d ua = Eigen::Vector2d::Zero(), ub = Eigen::Vector2d::Zero();
    Eigen::Vector2d la = Eigen::Vector2d::Zero(), lb = Eigen::Vector2d::Zero();
    for (int k = 0; k < st.dim(); ++k) {
      ua[k] = q.u[static_cast<Eigen::Index>(st.dof(el.nodes[0], k))];
      ub[k] = q.u[static_cast<Eigen::Index>(st.dof(el.nodes[1], k))];
      la[k] = q.lambda[static_cast<Eigen::Index>(st.dof(el.nodes[0], k))];
      lb[k] = q.lambda[static_cast<Eigen::Index>(st.dof(el.nodes[1], k))];
    }
    const Eigen::Vector2d du = (ub - ua) / len;
    const Eigen::Vector2d dl = (lb - la) / len;
    const double eps = t.dot(du) + 0.5 * alpha * du.dot(du);
    const auto ii = static_cast<Eigen::Index>(i);
    const double e = q.e[ii], s = q.s[ii], mu = q.mu[ii];
    value += len * (0.5 * c * (e - data[i].strain) * (e - data[i].strain) +
                    0.5 / c * (s - data[i].stress) * (s - data[i].stress));
    value += mu * len * (eps - e);
    // internal virtual work of the stress on the multiplier field
    value += el.area * len * s * (t + alpha * du).dot(dl);
  }
  value -= q.lambda.dot(load);
  return value;
}

/// Gradient of the reference Lagrangian with respect to the reduced unknowns, by central
/// differences with a per-entry step.
inline Eigen::VectorXd reference_gradient(const Structure& st, const State& q, std::span<const DataPoint> data,
                                          const Eigen::VectorXd& load, int alpha, double c) {
  const DofMap map = DofMap::of(st);
  const Eigen::VectorXd x = pack(map, q);
  Eigen::VectorXd g(x.size());
  State work = q;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double h = 1e-5 * (1.0 + std::abs(x[k]));
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    unpack(map, xp, work);
    const double fp = reference_lagrangian(st, work, data, load, alpha, c);
    unpack(map, xm, work);
    const double fm = reference_lagrangian(st, work, data, load, alpha, c);
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Random state with entries of realistic magnitude for the given material scale.
inline State random_state(const Structure& st, std::mt19937_64& rng, double strain_scale, double stress_scale) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  State q = State::zeros(st);
  double reach = 0.0;
  for (const auto& el : st.elements()) reach = std::max(reach, el.length);
  for (auto d : st.free_dofs()) {
    q.u[static_cast<Eigen::Index>(d)] = strain_scale * reach * unit(rng);
    q.lambda[static_cast<Eigen::Index>(d)] = strain_scale * reach * unit(rng);
  }
  for (Eigen::Index i = 0; i < q.e.size(); ++i) {
    q.e[i] = strain_scale * unit(rng);
    q.s[i] = stress_scale * unit(rng);
    q.mu[i] = stress_scale * strain_scale * unit(rng);
  }
  return q;
}

struct JacobianCheck {
  double fd_error = 0.0;        ///< max over probes of |A v - FD| / |A v|
  double symmetry_error = 0.0;  ///< |A - A^T| / |A|
};

/// Compares the assembled (scaled) matrix with central differences of the scaled residual
/// along `probes` random unit directions, h = 1e-6 (1 + |z|) in scaled unknowns z = C q.
inline JacobianCheck check_jacobian(const Structure& st, const State& q, std::span<const DataPoint> data,
                                    const Eigen::VectorXd& load, const KktParams& params, std::mt19937_64& rng,
                                    int probes) {
  const KktSystem sys = assemble_kkt(st, q, data, load, params);
  const DofMap& map = sys.dof_map;
  const Eigen::VectorXd z = pack(map, q).cwiseProduct(sys.col_scale);
  const double h = 1e-6 * (1.0 + z.norm());
  std::normal_distribution<double> normal;
  JacobianCheck out;
  out.symmetry_error = (sys.matrix - sys.matrix.transpose()).norm() / sys.matrix.norm();
  State work = q;
  for (int p = 0; p < probes; ++p) {
    Eigen::VectorXd v(z.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = normal(rng);
    v.normalize();
    unpack(map, (z + h * v).cwiseQuotient(sys.col_scale), work);
    const Eigen::VectorXd gp = kkt_residual(st, work, data, load, params).cwiseProduct(sys.row_scale);
    unpack(map, (z - h * v).cwiseQuotient(sys.col_scale), work);
    const Eigen::VectorXd gm = kkt_residual(st, work, data, load, params).cwiseProduct(sys.row_scale);
    const Eigen::VectorXd fd = (gp - gm) / (2.0 * h);
    const Eigen::VectorXd av = sys.matrix * v;
    out.fd_error = std::max(out.fd_error, (av - fd).norm() / av.norm());
  }
  return out;
}

}  // namespace ddelast::testing
