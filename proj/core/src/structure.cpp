#include "ddelast/structure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>

#include <Eigen/Dense>
#include <json.hpp>

#include "ddelast/errors.hpp"

namespace ddelast {

Structure::Structure(int dim, std::vector<Eigen::Vector2d> nodes, std::vector<Member> members,
                     std::vector<Support> supports, std::vector<NodalLoad> loads, DistributedLoad distributed)
    : dim_(dim), nodes_(std::move(nodes)) {
  require(dim_ == 1 || dim_ == 2, ErrorCode::kInvalidArgument, "dimension must be 1 or 2");
  require(!members.empty(), ErrorCode::kInvalidArgument, "structure needs at least one element");
  if (dim_ == 1) {
    for (auto& x : nodes_) x.y() = 0.0;
  }

  elements_.reserve(members.size());
  for (const auto& m : members) {
    require(m.a < nodes_.size() && m.b < nodes_.size(), ErrorCode::kInvalidArgument, "element node out of range");
    require(m.a != m.b, ErrorCode::kInvalidArgument, "element nodes must be distinct");
    require(m.area > 0.0 && std::isfinite(m.area), ErrorCode::kInvalidArgument, "element area must be positive");
    const Eigen::Vector2d d = nodes_[m.b] - nodes_[m.a];
    const double length = d.norm();
    require(length > 0.0, ErrorCode::kInvalidArgument, "element has zero reference length");
    elements_.push_back({{m.a, m.b}, m.area, length, d / length});
  }

  fixed_.assign(n_dofs(), false);
  require(!supports.empty(), ErrorCode::kInvalidArgument, "structure needs at least one support");
  for (const auto& s : supports) {
    require(s.node < nodes_.size(), ErrorCode::kInvalidArgument, "support node out of range");
    for (int k = 0; k < dim_; ++k) {
      if (s.fixed[static_cast<std::size_t>(k)]) fixed_[dof(s.node, k)] = true;
    }
  }
  for (std::size_t i = 0; i < n_dofs(); ++i) {
    if (!fixed_[i]) free_dofs_.push_back(i);
  }

  reference_load_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_dofs()));
  for (const auto& load : loads) {
    require(load.node < nodes_.size(), ErrorCode::kInvalidArgument, "load node out of range");
    for (int k = 0; k < dim_; ++k) reference_load_[static_cast<Eigen::Index>(dof(load.node, k))] += load.force[k];
  }
  if (distributed) {
    const double offset = 0.5 / std::numbers::sqrt3;
    const std::array<double, 2> points{0.5 - offset, 0.5 + offset};
    for (const auto& el : elements_) {
      const auto& xa = nodes_[el.nodes[0]];
      const auto& xb = nodes_[el.nodes[1]];
      for (double t : points) {
        const Eigen::Vector2d f = distributed(xa + t * (xb - xa));
        for (int k = 0; k < dim_; ++k) {
          reference_load_[static_cast<Eigen::Index>(dof(el.nodes[0], k))] += 0.5 * el.length * (1.0 - t) * f[k];
          reference_load_[static_cast<Eigen::Index>(dof(el.nodes[1], k))] += 0.5 * el.length * t * f[k];
        }
      }
    }
  }

  // Rigid-body check: the linear axial stiffness restricted to free DOFs must be regular.
  const auto n_free = static_cast<Eigen::Index>(free_dofs_.size());
  if (n_free > 0) {
    std::vector<Eigen::Index> position(n_dofs(), -1);
    for (Eigen::Index i = 0; i < n_free; ++i) position[free_dofs_[static_cast<std::size_t>(i)]] = i;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n_free, n_free);
    for (const auto& el : elements_) {
      std::array<Eigen::Index, 4> rows{-1, -1, -1, -1};
      std::array<double, 4> b{};
      for (int a = 0; a < 2; ++a) {
        for (int c = 0; c < dim_; ++c) {
          const auto slot = static_cast<std::size_t>(a * dim_ + c);
          rows[slot] = position[dof(el.nodes[static_cast<std::size_t>(a)], c)];
          b[slot] = (a == 0 ? -1.0 : 1.0) * el.tangent[c];
        }
      }
      for (std::size_t i = 0; i < static_cast<std::size_t>(2 * dim_); ++i) {
        for (std::size_t j = 0; j < static_cast<std::size_t>(2 * dim_); ++j) {
          if (rows[i] >= 0 && rows[j] >= 0) k(rows[i], rows[j]) += el.area / el.length * b[i] * b[j];
        }
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
    require(lu.rank() == n_free, ErrorCode::kIllPosed, "supports do not remove all rigid-body modes");
  }
}

Structure Structure::with_scaled_load(double factor) const {
  Structure copy = *this;
  copy.reference_load_ *= factor;
  return copy;
}

Structure build_bar(double length, std::size_t n_elements, double area, BarSupports supports, const BarLoads& loads) {
  require(n_elements >= 1, ErrorCode::kInvalidArgument, "bar needs at least one element");
  require(length > 0.0, ErrorCode::kInvalidArgument, "bar length must be positive");
  std::vector<Eigen::Vector2d> nodes;
  nodes.reserve(n_elements + 1);
  for (std::size_t i = 0; i <= n_elements; ++i) {
    nodes.emplace_back(length * static_cast<double>(i) / static_cast<double>(n_elements), 0.0);
  }
  std::vector<Member> members;
  for (std::size_t i = 0; i < n_elements; ++i) members.push_back({i, i + 1, area});
  std::vector<Support> sup{{0, {true, true}}};
  if (supports == BarSupports::kFixedFixed) sup.push_back({n_elements, {true, true}});
  std::vector<NodalLoad> nodal;
  if (loads.tip_force != 0.0) nodal.push_back({n_elements, {loads.tip_force, 0.0}});
  return Structure(1, std::move(nodes), std::move(members), std::move(sup), std::move(nodal), loads.distributed);
}

Structure build_truss(std::vector<Eigen::Vector2d> nodes, std::vector<Member> members, std::vector<Support> supports,
                      std::vector<NodalLoad> loads) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<bool> used(nodes.size(), false);
  for (const auto& m : members) {
    require(m.a < nodes.size() && m.b < nodes.size(), ErrorCode::kInvalidArgument, "member node out of range");
    const auto key = std::minmax(m.a, m.b);
    require(seen.insert(key).second, ErrorCode::kInvalidArgument, "duplicate member");
    used[m.a] = true;
    used[m.b] = true;
  }
  require(std::all_of(used.begin(), used.end(), [](bool u) { return u; }), ErrorCode::kInvalidArgument,
          "dangling node without members");
  return Structure(2, std::move(nodes), std::move(members), std::move(supports), std::move(loads));
}

double manufactured_displacement(double x, const BenchmarkSpec& spec) {
  return spec.beta * std::sin(std::numbers::pi * x / spec.length);
}

double manufactured_displacement_gradient(double x, const BenchmarkSpec& spec) {
  const double k = std::numbers::pi / spec.length;
  return spec.beta * k * std::cos(k * x);
}

double manufactured_bar_load(double x, const BenchmarkSpec& spec) {
  const double k = std::numbers::pi / spec.length;
  const double du = spec.beta * k * std::cos(k * x);
  const double ddu = -spec.beta * k * k * std::sin(k * x);
  const double a = spec.alpha;
  return spec.area * (-spec.modulus * ddu * (1.0 + 3.0 * a * du + 1.5 * a * a * du * du));
}

Structure build_manufactured_bar(const BenchmarkSpec& spec, std::size_t n_elements) {
  require(spec.modulus > 0 && spec.beta > 0 && spec.length > 0 && spec.area > 0, ErrorCode::kInvalidArgument,
          "benchmark parameters must be positive");
  BarLoads loads;
  loads.distributed = [spec](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(manufactured_bar_load(x.x(), spec), 0.0);
  };
  return build_bar(spec.length, n_elements, spec.area, BarSupports::kFixedFixed, loads);
}

namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

Structure bar_from_json(const json& bar) {
  const double length = bar.at("length").get<double>();
  const auto n = bar.at("elements").get<std::size_t>();
  const double area = bar.contains("area") ? bar.at("area").get<double>()
                                           : std::numbers::pi * std::pow(bar.at("radius").get<double>(), 2);
  if (bar.contains("manufactured")) {
    const auto& m = bar.at("manufactured");
    BenchmarkSpec spec;
    spec.modulus = m.at("modulus").get<double>();
    spec.beta = m.at("beta").get<double>();
    spec.alpha = get_or<int>(m, "alpha", 0);
    spec.length = length;
    spec.area = area;
    return build_manufactured_bar(spec, n);
  }
  const auto sup = get_or<std::string>(bar, "supports", "fixed-fixed");
  require(sup == "fixed-fixed" || sup == "fixed-free", ErrorCode::kConfig, "bar supports must be fixed-fixed or fixed-free");
  BarLoads loads;
  loads.tip_force = get_or<double>(bar, "tip_force", 0.0);
  return build_bar(length, n, area, sup == "fixed-fixed" ? BarSupports::kFixedFixed : BarSupports::kFixedFree, loads);
}

Structure truss_from_json(const json& j) {
  std::vector<Eigen::Vector2d> nodes;
  for (const auto& n : j.at("nodes")) nodes.emplace_back(n.at(0).get<double>(), n.at(1).get<double>());
  const double default_area = get_or<double>(j, "area", 0.0);
  std::vector<Member> members;
  for (const auto& m : j.at("members")) {
    members.push_back({m.at("nodes").at(0).get<std::size_t>(), m.at("nodes").at(1).get<std::size_t>(),
                       get_or<double>(m, "area", default_area)});
  }
  std::vector<Support> supports;
  for (const auto& s : j.at("supports")) {
    Support sup;
    sup.node = s.at("node").get<std::size_t>();
    if (s.contains("fix")) sup.fixed = {s.at("fix").at(0).get<bool>(), s.at("fix").at(1).get<bool>()};
    supports.push_back(sup);
  }
  std::vector<NodalLoad> loads;
  if (j.contains("loads")) {
    for (const auto& l : j.at("loads")) {
      loads.push_back({l.at("node").get<std::size_t>(),
                       Eigen::Vector2d(l.at("force").at(0).get<double>(), l.at("force").at(1).get<double>())});
    }
  }
  return build_truss(std::move(nodes), std::move(members), std::move(supports), std::move(loads));
}

}  // namespace

Structure parse_structure(std::string_view json_text) {
  try {
    const json j = json::parse(json_text);
    if (j.contains("bar")) return bar_from_json(j.at("bar"));
    return truss_from_json(j);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, std::string("structure config: ") + e.what());
  }
}

Structure load_structure(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_structure(buffer.str());
}

}  // namespace ddelast
