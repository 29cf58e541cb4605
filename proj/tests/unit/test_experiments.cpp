#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "ddelast/errors.hpp"
#include "ddelast/experiments.hpp"

namespace ddelast {
namespace {

TEST(L2Error, NodalInterpolantAndZeroField) {
  const BenchmarkSpec spec;
  const Structure bar = build_manufactured_bar(spec, 64);
  Eigen::VectorXd u(bar.n_nodes());
  for (std::size_t i = 0; i < bar.n_nodes(); ++i) {
    u[static_cast<Eigen::Index>(i)] = manufactured_displacement(bar.nodes()[i].x(), spec);
  }
  // Interpolation error of sin is O(h^2).
  const double e64 = relative_l2_error(bar, u, spec);
  EXPECT_LT(e64, 1e-3);
  const Structure coarse = build_manufactured_bar(spec, 32);
  Eigen::VectorXd uc(coarse.n_nodes());
  for (std::size_t i = 0; i < coarse.n_nodes(); ++i) {
    uc[static_cast<Eigen::Index>(i)] = manufactured_displacement(coarse.nodes()[i].x(), spec);
  }
  EXPECT_NEAR(relative_l2_error(coarse, uc, spec) / e64, 4.0, 0.1);
  EXPECT_NEAR(relative_l2_error(bar, Eigen::VectorXd::Zero(bar.n_nodes()), spec), 1.0, 1e-12);
}

TEST(L2Error, ReferenceStrainMaximum) {
  BenchmarkSpec spec;
  const double g = 0.15 * std::numbers::pi;
  EXPECT_NEAR(reference_strain_max(spec), g, 1e-15);
  spec.alpha = 1;
  EXPECT_NEAR(reference_strain_max(spec), g + 0.5 * g * g, 1e-15);
}

TEST(Convergence, SmallLinearGridImproves) {
  ConvergenceOptions opt;
  opt.elements = {4, 16};
  opt.data_points = {17, 129};
  const ConvergenceTable t = run_convergence_study(opt);
  ASSERT_EQ(t.cells.size(), 4u);
  for (const auto& cell : t.cells) EXPECT_TRUE(cell.converged) << cell.failure;
  EXPECT_LE(t.at(1, 1).error, t.at(0, 1).error);
  EXPECT_LE(t.at(1, 1).error, t.at(1, 0).error);
  std::ostringstream csv;
  write_convergence_csv(t, csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "elements,data_points,relative_l2_error,objective,converged");
  opt.elements.clear();
  EXPECT_THROW(run_convergence_study(opt), Error);
}

TEST(Polygon, ShoelaceArea) {
  const std::vector<double> x{0, 2, 2, 0};
  const std::vector<double> y{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(polygon_area(x, y), 2.0);
  const std::vector<double> rx(x.rbegin(), x.rend());
  const std::vector<double> ry(y.rbegin(), y.rend());
  EXPECT_DOUBLE_EQ(polygon_area(rx, ry), 2.0);
  EXPECT_THROW(polygon_area(x, std::vector<double>{0, 1}), Error);
}

TEST(Cyclic, ShapeOfSyntheticTest) {
  CyclicTestSpec spec;
  spec.area = std::numbers::pi * 0.25 * 0.208 * 0.208;
  const CyclicTest test = generate_cyclic_test(spec);
  ASSERT_EQ(test.time.size(), 121u);
  ASSERT_EQ(test.phases.size(), 3u);
  EXPECT_EQ(test.phases[0].end, 41u);
  EXPECT_EQ(test.phases[2].end, 121u);
  EXPECT_DOUBLE_EQ(test.force.front(), 0.0);
  EXPECT_DOUBLE_EQ(test.force[40], spec.peak_force);
  EXPECT_DOUBLE_EQ(test.force[80], spec.min_force);
  EXPECT_DOUBLE_EQ(test.force.back(), spec.peak_force);
  // Reloading ends past the first peak strain: the loop does not close on itself.
  EXPECT_GT(test.strain.back(), test.strain[40]);
  for (const auto& r : test.phases) {
    std::vector<DataPoint> pts;
    for (std::size_t i = r.begin; i < r.end; ++i) pts.push_back({test.strain[i], test.force[i] / spec.area});
    EXPECT_TRUE(check_consistency(pts).consistent);
  }
  std::ostringstream out;
  write_cyclic_csv(test, out);
  EXPECT_NE(out.str().find("time_s,force_N,strain"), std::string::npos);
}

TEST(Rope, LoopOnCoarseMesh) {
  RopeOptions opt;
  opt.elements = 4;
  CyclicTestSpec spec;
  spec.area = rope_area(opt);
  spec.points_per_branch = 10;
  const CyclicTest test = generate_cyclic_test(spec);
  std::vector<DataPoint> pts;
  for (std::size_t i = 0; i < test.time.size(); ++i) pts.push_back({test.strain[i], test.force[i] / spec.area});
  const Dataset data(pts, {});
  const RopeResult r = run_rope(data, test.phases, opt);
  ASSERT_TRUE(r.completed);
  ASSERT_EQ(r.phases.size(), 3u);
  EXPECT_FALSE(r.phases[0].warm_started);
  EXPECT_TRUE(r.phases[1].warm_started);
  EXPECT_TRUE(r.phases[2].warm_started);
  for (const auto& p : r.phases) {
    EXPECT_TRUE(p.data_check.consistent);
    EXPECT_TRUE(p.state_check.consistent);
    EXPECT_EQ(p.forces.size(), p.data.size());
  }
  EXPECT_GT(r.hysteresis_area, 0.0);
  EXPECT_GT(r.phases[0].deflections.back(), 0.0);
  std::ostringstream out;
  write_load_deflection_csv(r, out);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "phase,step,force_N,deflection_m,objective");
}

TEST(Rope, InconsistentPhaseNeedsForce) {
  RopeOptions opt;
  opt.elements = 2;
  const double a = rope_area(opt);
  const Dataset data({{0.0, 0.0}, {0.01, 2e6 / a}, {0.02, 1e6 / a}}, {});
  const std::vector<IndexRange> one{{0, 3}};
  try {
    run_rope(data, one, opt);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  opt.force = true;
  const RopeResult r = run_rope(data, one, opt);
  EXPECT_FALSE(r.phases[0].data_check.consistent);
}

}  // namespace
}  // namespace ddelast
