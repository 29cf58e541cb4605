#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace ddelast {

/// Axial force density (N/m) as a function of the reference position of a material point.
using DistributedLoad = std::function<Eigen::Vector2d(const Eigen::Vector2d& reference_point)>;

struct Element {
  std::array<std::size_t, 2> nodes{};
  double area = 0.0;              ///< m^2
  double length = 0.0;            ///< reference length, m
  Eigen::Vector2d tangent{0, 0};  ///< unit reference tangent (X_b - X_a) / L
};

struct Support {
  std::size_t node = 0;
  std::array<bool, 2> fixed{true, true};  ///< per component; only [0] is used in 1D
};

struct NodalLoad {
  std::size_t node = 0;
  Eigen::Vector2d force{0, 0};  ///< N
};

struct Member {
  std::size_t a = 0;
  std::size_t b = 0;
  double area = 0.0;
};

/// Discretised bar or truss: reference nodes, two-node constant-stress elements,
/// homogeneous Dirichlet supports and a reference external load. Displacement DOFs
/// are numbered node-major: dof(node, k) = node * dim + k.
class Structure {
 public:
  Structure(int dim, std::vector<Eigen::Vector2d> nodes, std::vector<Member> members,
            std::vector<Support> supports, std::vector<NodalLoad> loads, DistributedLoad distributed = {});

  int dim() const noexcept { return dim_; }
  std::size_t n_nodes() const noexcept { return nodes_.size(); }
  std::size_t n_elements() const noexcept { return elements_.size(); }
  std::size_t n_dofs() const noexcept { return nodes_.size() * static_cast<std::size_t>(dim_); }
  std::size_t dof(std::size_t node, int component) const {
    return node * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(component);
  }

  const std::vector<Eigen::Vector2d>& nodes() const noexcept { return nodes_; }
  const std::vector<Element>& elements() const noexcept { return elements_; }
  const Element& element(std::size_t i) const { return elements_[i]; }

  bool is_fixed(std::size_t dof) const { return fixed_[dof]; }
  /// Unconstrained DOF indices in increasing order.
  const std::vector<std::size_t>& free_dofs() const noexcept { return free_dofs_; }

  /// Reference external load vector (length n_dofs, N): nodal loads plus the
  /// distributed load integrated with 2-point Gauss quadrature per element.
  const Eigen::VectorXd& reference_load() const noexcept { return reference_load_; }

  /// Same structure with the reference load multiplied by `factor`.
  Structure with_scaled_load(double factor) const;

 private:
  int dim_;
  std::vector<Eigen::Vector2d> nodes_;
  std::vector<Element> elements_;
  std::vector<bool> fixed_;
  std::vector<std::size_t> free_dofs_;
  Eigen::VectorXd reference_load_;
};

enum class BarSupports { kFixedFixed, kFixedFree };

struct BarLoads {
  DistributedLoad distributed;  ///< optional axial force density along the bar
  double tip_force = 0.0;       ///< nodal force at the right end, N
};

/// Straight 1D bar on [0, L0] with n_elements equal elements.
Structure build_bar(double length, std::size_t n_elements, double area, BarSupports supports,
                    const BarLoads& loads = {});

/// 2D pin-jointed truss. Rejects duplicate members, dangling nodes and
/// supports that leave a mechanism.
Structure build_truss(std::vector<Eigen::Vector2d> nodes, std::vector<Member> members,
                      std::vector<Support> supports, std::vector<NodalLoad> loads);

/// Parameters of the manufactured-displacement bar u(x) = beta * sin(pi x / L0).
struct BenchmarkSpec {
  double modulus = 70e9;  ///< E, Pa
  double beta = 0.15 * 3.141592653589793;
  double length = 3.141592653589793;
  int alpha = 0;
  double area = 3.141592653589793 * 0.02 * 0.02;
};

double manufactured_displacement(double x, const BenchmarkSpec& spec);
double manufactured_displacement_gradient(double x, const BenchmarkSpec& spec);

/// Axial force density A * (-E u'' (1 + 3 alpha u' + 1.5 alpha^2 u'^2)) that produces the
/// manufactured displacement under a linear material law, in N/m.
double manufactured_bar_load(double x, const BenchmarkSpec& spec);

/// Fixed-fixed bar carrying the manufactured load.
Structure build_manufactured_bar(const BenchmarkSpec& spec, std::size_t n_elements);

/// Structure description in JSON (schema in docs/structure_config.md).
Structure parse_structure(std::string_view json_text);
Structure load_structure(const std::filesystem::path& path);

}  // namespace ddelast
