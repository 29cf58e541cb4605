#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ddelast/errors.hpp"
#include "ddelast/structure.hpp"

namespace ddelast {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no ddelast::Error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(Bar, GeometryAndDofs) {
  const Structure bar = build_bar(2.0, 4, 1e-3, BarSupports::kFixedFixed);
  EXPECT_EQ(bar.dim(), 1);
  EXPECT_EQ(bar.n_nodes(), 5u);
  EXPECT_EQ(bar.n_dofs(), 5u);
  EXPECT_EQ(bar.free_dofs(), (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_TRUE(bar.is_fixed(0));
  EXPECT_TRUE(bar.is_fixed(4));
  for (const auto& el : bar.elements()) {
    EXPECT_DOUBLE_EQ(el.length, 0.5);
    EXPECT_DOUBLE_EQ(el.tangent.x(), 1.0);
  }
  const Structure free_end = build_bar(2.0, 4, 1e-3, BarSupports::kFixedFree, BarLoads{{}, 10.0});
  EXPECT_EQ(free_end.free_dofs().size(), 4u);
  EXPECT_DOUBLE_EQ(free_end.reference_load()[4], 10.0);
  EXPECT_DOUBLE_EQ(free_end.with_scaled_load(-3.0).reference_load()[4], -30.0);
}

TEST(Bar, ConstantDistributedLoadLumpsConsistently) {
  BarLoads loads;
  loads.distributed = [](const Eigen::Vector2d&) { return Eigen::Vector2d(6.0, 0.0); };
  const Structure bar = build_bar(3.0, 3, 1.0, BarSupports::kFixedFixed, loads);
  const Eigen::VectorXd& f = bar.reference_load();
  EXPECT_DOUBLE_EQ(f[0], 3.0);
  EXPECT_DOUBLE_EQ(f[1], 6.0);
  EXPECT_DOUBLE_EQ(f[2], 6.0);
  EXPECT_DOUBLE_EQ(f[3], 3.0);
}

TEST(Bar, LinearDistributedLoadIsIntegratedExactly) {
  // q(x) = x on a single element [0, 1]: int N_a q = 1/6, int N_b q = 1/3.
  BarLoads loads;
  loads.distributed = [](const Eigen::Vector2d& x) { return Eigen::Vector2d(x.x(), 0.0); };
  const Structure bar = build_bar(1.0, 1, 1.0, BarSupports::kFixedFree, loads);
  EXPECT_NEAR(bar.reference_load()[0], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(bar.reference_load()[1], 1.0 / 3.0, 1e-15);
}

// Frozen from a symbolic evaluation of the manufactured body force with E = 70 GPa,
// beta = 0.15 pi, L0 = pi and a circular 0.02 m radius section.
TEST(Manufactured, FrozenLoadValues) {
  BenchmarkSpec spec;
  const double l0 = spec.length;
  EXPECT_NEAR(manufactured_bar_load(l0 / 4, spec), 29311229.638483294, 1e-6);
  EXPECT_NEAR(manufactured_bar_load(l0 / 2, spec), 41452338.484575306, 1e-6);
  spec.alpha = 1;
  EXPECT_NEAR(manufactured_bar_load(l0 / 4, spec), 63493933.918938824, 1e-6);
  EXPECT_NEAR(manufactured_bar_load(l0 / 2, spec), 41452338.484575306, 1e-6);
}

TEST(Manufactured, LoadBalancesDivergenceOfNominalStress) {
  // f = -d/dx [A E eps(u') (1 + alpha u')] with eps = u' + alpha/2 u'^2.
  for (int alpha : {0, 1}) {
    BenchmarkSpec spec;
    spec.alpha = alpha;
    auto axial = [&](double x) {
      const double g = manufactured_displacement_gradient(x, spec);
      return spec.area * spec.modulus * (g + 0.5 * alpha * g * g) * (1.0 + alpha * g);
    };
    for (double x : {0.3, 1.1, 2.0, 2.9}) {
      const double h = 1e-5;
      const double fd = -(axial(x + h) - axial(x - h)) / (2 * h);
      EXPECT_NEAR(manufactured_bar_load(x, spec), fd, 1e-6 * std::abs(fd) + 1.0);
    }
  }
}

TEST(Manufactured, DisplacementAndBar) {
  const BenchmarkSpec spec;
  EXPECT_DOUBLE_EQ(manufactured_displacement(spec.length / 2, spec), spec.beta);
  EXPECT_NEAR(manufactured_displacement_gradient(0.0, spec), spec.beta * std::numbers::pi / spec.length, 1e-15);
  const Structure bar = build_manufactured_bar(spec, 8);
  EXPECT_EQ(bar.free_dofs().size(), 7u);
  // Total load equals 2 A E beta pi / L0 up to the quadrature error.
  const double total = bar.reference_load().sum();
  const double exact = 2.0 * spec.area * spec.modulus * spec.beta * std::numbers::pi / spec.length;
  EXPECT_NEAR(total, exact, 1e-3 * exact);
}

TEST(Truss, VShapeGeometry) {
  const Structure t = build_truss({{-1, 1}, {1, 1}, {0, 0}}, {{0, 2, 2e-3}, {1, 2, 2e-3}},
                                  {{0, {true, true}}, {1, {true, true}}}, {{2, {0, -400}}});
  EXPECT_EQ(t.dim(), 2);
  EXPECT_EQ(t.n_dofs(), 6u);
  EXPECT_EQ(t.free_dofs(), (std::vector<std::size_t>{4, 5}));
  EXPECT_DOUBLE_EQ(t.element(0).length, std::sqrt(2.0));
  EXPECT_NEAR(t.element(0).tangent.x(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(t.element(0).tangent.y(), -1 / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(t.reference_load()[5], -400.0);
}

TEST(Truss, RejectsInvalidTopology) {
  const std::vector<Eigen::Vector2d> nodes{{0, 0}, {1, 0}, {0, 1}};
  const std::vector<Support> pinned{{0, {true, true}}, {2, {true, true}}};
  EXPECT_EQ(code_of([&] { build_truss(nodes, {{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}}, pinned, {}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { build_truss(nodes, {{0, 1, 1.0}}, pinned, {}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { build_truss(nodes, {{0, 1, 1.0}, {1, 2, 0.0}}, pinned, {}); }),
            ErrorCode::kInvalidArgument);
  // Only one pin: the structure can rotate about it.
  EXPECT_EQ(code_of([&] { build_truss(nodes, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}, {{0, {true, true}}}, {}); }),
            ErrorCode::kIllPosed);
  EXPECT_EQ(code_of([&] { build_truss(nodes, {{0, 1, 1.0}, {1, 2, 1.0}}, {{5, {true, true}}}, {}); }),
            ErrorCode::kInvalidArgument);
}

TEST(Config, ParsesBarAndTruss) {
  const Structure bar = parse_structure(R"({"bar": {"length": 1.0, "elements": 2, "radius": 0.1,
                                           "supports": "fixed-free", "tip_force": 5.0}})");
  EXPECT_NEAR(bar.element(0).area, std::numbers::pi * 0.01, 1e-16);
  EXPECT_DOUBLE_EQ(bar.reference_load()[2], 5.0);

  const Structure truss = parse_structure(R"({"nodes": [[0,0],[1,0],[0,1]], "area": 0.5,
      "members": [{"nodes": [0,1]}, {"nodes": [1,2], "area": 0.25}, {"nodes": [0,2]}],
      "supports": [{"node": 0}, {"node": 2, "fix": [true, false]}],
      "loads": [{"node": 1, "force": [0, -1]}]})");
  EXPECT_DOUBLE_EQ(truss.element(1).area, 0.25);
  EXPECT_DOUBLE_EQ(truss.element(2).area, 0.5);
  EXPECT_FALSE(truss.is_fixed(5));
  EXPECT_EQ(truss.free_dofs().size(), 3u);

  EXPECT_EQ(code_of([] { parse_structure("{not json"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { parse_structure(R"({"bar": {"length": 1, "elements": 2, "area": 1, "supports": "x"}})"); }),
            ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { load_structure("/nonexistent/structure.json"); }), ErrorCode::kIo);
}

}  // namespace
}  // namespace ddelast
