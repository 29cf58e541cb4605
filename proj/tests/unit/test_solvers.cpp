#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "ddelast/errors.hpp"
#include "ddelast/solvers.hpp"

namespace ddelast {
namespace {

Structure v_truss(double load = -400.0) {
  return build_truss({{-1, 1}, {1, 1}, {0, 0}}, {{0, 2, 2e-3}, {1, 2, 2e-3}},
                     {{0, {true, true}}, {1, {true, true}}}, {{2, {0, load}}});
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no ddelast::Error thrown";
  return ErrorCode::kInvalidArgument;
}

// Plain scan of the element metric, ties to the first index.
std::size_t brute_nearest(const DataPoint& p, const Dataset& d, double c) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double v = 0.5 * c * std::pow(p.strain - d[j].strain, 2) + 0.5 / c * std::pow(p.stress - d[j].stress, 2);
    if (v < best_d) {
      best_d = v;
      best = j;
    }
  }
  return best;
}

TEST(Nearest, AgreesWithBruteForce) {
  const Dataset d = add_noise(generate_sigmoid(4e8, 101, 0.2), 0.05, 9);
  const double c = least_squares_modulus(d);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> e(-0.3, 0.3), s(-6e8, 6e8);
  for (int i = 0; i < 500; ++i) {
    const DataPoint p{e(rng), s(rng)};
    EXPECT_EQ(nearest_point(p, d, c), brute_nearest(p, d, c));
    const auto [first, second] = two_nearest_points(p, d, c);
    EXPECT_EQ(first, nearest_point(p, d, c));
    ASSERT_TRUE(second.has_value());
    EXPECT_NE(*second, first);
  }
}

TEST(Nearest, TiesGoToLowerIndex) {
  const Dataset d({{-1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}}, {});
  EXPECT_EQ(nearest_point({0.0, 0.0}, d, 1.0), 0u);
  EXPECT_EQ(two_nearest_points({1.0, 0.0}, d, 1.0).second, 2u);
  EXPECT_FALSE(two_nearest_points({0.0, 0.0}, Dataset({{0.0, 0.0}}, {}), 1.0).second.has_value());
}

TEST(OneHot, RoundTripAndValidation) {
  const Assignment a{{2, 0, 4, 4}};
  const Eigen::MatrixXi t = to_one_hot(a, 5);
  EXPECT_EQ(t.rows(), 4);
  EXPECT_EQ(t.cols(), 5);
  EXPECT_EQ(t.rowwise().sum(), Eigen::VectorXi::Ones(4));
  EXPECT_EQ(t(2, 4), 1);
  EXPECT_EQ(from_one_hot(t), a);
  EXPECT_EQ(code_of([&] { to_one_hot(a, 4); }), ErrorCode::kInvalidArgument);
  Eigen::MatrixXi two = t;
  two(0, 0) = 1;
  EXPECT_EQ(code_of([&] { from_one_hot(two); }), ErrorCode::kInvalidArgument);
  Eigen::MatrixXi none = t;
  none(1, 0) = 0;
  EXPECT_EQ(code_of([&] { from_one_hot(none); }), ErrorCode::kInvalidArgument);
}

TEST(Equilibrium, VTrussHandStatics) {
  // Symmetric V under a vertical tip load: each member carries N = P / sqrt(2) in tension.
  const Structure t = v_truss();
  const Eigen::VectorXd s = equilibrium_stress(t, t.reference_load());
  const double expected = 400.0 / std::sqrt(2.0) / 2e-3;
  EXPECT_NEAR(s[0], expected, 1e-9 * expected);
  EXPECT_NEAR(s[1], expected, 1e-9 * expected);
}

TEST(Equilibrium, MinimumNormForIndeterminateBar) {
  // Fixed-fixed bar with a midpoint load: s1 - s2 = F / A, minimum norm splits it evenly.
  const Structure bar(1, {{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 0.5}, {1, 2, 0.5}}, {{0, {true, true}}, {2, {true, true}}},
                      {{1, {10.0, 0.0}}});
  const Eigen::VectorXd s = equilibrium_stress(bar, bar.reference_load());
  EXPECT_NEAR(s[0], 10.0, 1e-12);
  EXPECT_NEAR(s[1], -10.0, 1e-12);
}

TEST(Initialize, Modes) {
  const Structure t = v_truss();
  const Dataset d = generate_linear(1e8, 11, 0.01);
  const double c = least_squares_modulus(d);
  SolverConfig config;

  config.init_mode = InitMode::kStressFree;
  std::string warning;
  EXPECT_EQ(initialize_data(t, d, config, c, t.reference_load(), &warning).indices, (std::vector<std::size_t>{5, 5}));
  EXPECT_TRUE(warning.empty());
  const Dataset shifted({{0.1, 1.0}, {0.5, 2.0}, {-0.2, -1.0}}, {});
  EXPECT_EQ(initialize_data(t, shifted, config, 10.0, t.reference_load(), &warning).indices,
            (std::vector<std::size_t>{0, 0}));
  EXPECT_FALSE(warning.empty());

  config.init_mode = InitMode::kStructureSpecific;
  // s = 141421 Pa on a stress grid with 2e5 Pa spacing: nearest is index 6 (2e5 Pa).
  EXPECT_EQ(initialize_data(t, d, config, c, t.reference_load()).indices, (std::vector<std::size_t>{6, 6}));

  config.init_mode = InitMode::kRandom;
  config.seed = 17;
  const Structure bar = build_bar(1.0, 50, 1.0, BarSupports::kFixedFree, BarLoads{{}, 1.0});
  const Assignment r1 = initialize_data(bar, d, config, c, bar.reference_load());
  const Assignment r2 = initialize_data(bar, d, config, c, bar.reference_load());
  EXPECT_EQ(r1, r2);
  config.seed = 18;
  EXPECT_NE(initialize_data(bar, d, config, c, bar.reference_load()), r1);
  for (auto idx : r1.indices) EXPECT_LT(idx, d.size());
}

TEST(Newton, LinearCaseIsOneSolve) {
  const Structure bar = build_manufactured_bar(BenchmarkSpec{}, 8);
  const Dataset d = generate_linear(70e9, 65, 0.25);
  const double c = least_squares_modulus(d);
  std::vector<DataPoint> assigned(8, d[40]);
  SolveStats stats;
  const NewtonResult r = newton_solve(bar, State::zeros(bar), assigned, bar.reference_load(), SolverConfig{}, c, &stats);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(stats.newton_iterations, 1);
  EXPECT_LT(r.final_residual, 1e-8 * r.initial_residual);
}

TEST(Newton, NonlinearCaseConvergesQuadratically) {
  BenchmarkSpec spec;
  spec.alpha = 1;
  const Structure bar = build_manufactured_bar(spec, 8);
  const Dataset d = generate_linear(70e9, 65, 0.25);
  const double c = least_squares_modulus(d);
  std::vector<DataPoint> assigned;
  for (std::size_t i = 0; i < 8; ++i) assigned.push_back(d[20 + 3 * i]);
  SolverConfig config;
  config.alpha = 1;
  const NewtonResult r = newton_solve(bar, State::zeros(bar), assigned, bar.reference_load(), config, c);
  ASSERT_GE(r.step_norms.size(), 3u);
  EXPECT_LT(r.final_residual, 1e-6 * r.initial_residual);
  // Once in the quadratic regime each step is far below the previous one.
  const auto n = r.step_norms.size();
  EXPECT_LT(r.step_norms[n - 1], 1e-3 * r.step_norms[n - 2]);

  config.newton_max_iters = 1;
  EXPECT_EQ(code_of([&] { newton_solve(bar, State::zeros(bar), assigned, bar.reference_load(), config, c); }),
            ErrorCode::kDiverged);
}

TEST(Newton, FlatTrussIsSingular) {
  // Pushing the apex up to the support line makes both members horizontal: with zero stress
  // the vertical equilibrium row of the Jacobian vanishes.
  const Structure t = v_truss();
  State guess = State::zeros(t);
  guess.u[5] = 1.0;
  const std::vector<DataPoint> assigned{{0.0, 0.0}, {0.0, 0.0}};
  SolverConfig config;
  config.alpha = 1;
  EXPECT_EQ(code_of([&] { newton_solve(t, guess, assigned, t.reference_load(), config, 1e8); }),
            ErrorCode::kSingular);
}

TEST(Adm, SingleElementPicksNearestStress) {
  // One fixed-free element: s = F / A is fixed by equilibrium, e follows the data point,
  // so the fixed point is the data stress closest to F / A.
  const Structure bar = build_bar(2.0, 1, 0.5, BarSupports::kFixedFree, BarLoads{{}, 3.0});
  const Dataset d({{0.0, 0.0}, {1.0, 5.0}, {2.0, 7.0}, {3.0, 9.0}}, {});
  SolverConfig config;
  const SolveResult r = adm_solve(bar, State::zeros(bar), Assignment{{0}}, d, bar.reference_load(), config, 1.0);
  EXPECT_EQ(r.assignment.indices[0], 1u);
  EXPECT_NEAR(r.state.s[0], 6.0, 1e-12);
  EXPECT_NEAR(r.state.e[0], 1.0, 1e-12);
  EXPECT_NEAR(r.objective, 2.0 / 2.0 * 1.0, 1e-12);
}

TEST(Adm, ConvergedStateIsAFixedPoint) {
  const Structure bar = build_manufactured_bar(BenchmarkSpec{}, 8);
  const Dataset d = generate_linear(70e9, 65, 0.25);
  const double c = least_squares_modulus(d);
  SolverConfig config;
  const Assignment init = initialize_data(bar, d, config, c, bar.reference_load());
  const SolveResult r = adm_solve(bar, State::zeros(bar), init, d, bar.reference_load(), config, c);
  EXPECT_EQ(local_state_assignment(bar, r.state, d, c), r.assignment);
  EXPECT_DOUBLE_EQ(r.objective, global_objective(bar, r.state, r.assignment, d, c));
  const Eigen::VectorXd g = kkt_residual(bar, r.state, assigned_points(r.assignment, d), bar.reference_load(),
                                         {0, c, 1.0});
  EXPECT_LT(g.norm(), 1e-6 * bar.reference_load().norm());
  EXPECT_GE(r.stats.adm_iterations, 1);

  config.adm_max_iters = 1;
  const Assignment far(std::vector<std::size_t>(8, 0));
  EXPECT_EQ(code_of([&] { adm_solve(bar, State::zeros(bar), far, d, bar.reference_load(), config, c); }),
            ErrorCode::kNoConvergence);
}

TEST(GoAdm, BookkeepingOnNonlinearBar) {
  BenchmarkSpec spec;
  spec.alpha = 1;
  const Structure bar = build_manufactured_bar(spec, 8);
  const Dataset d = generate_linear(70e9, 65, 0.4);
  const double c = least_squares_modulus(d);
  SolverConfig config;
  config.alpha = 1;
  const Assignment init = initialize_data(bar, d, config, c, bar.reference_load());
  const SolveResult adm = adm_solve(bar, State::zeros(bar), init, d, bar.reference_load(), config, c);
  for (int k_max : {0, 1, 3, 100}) {
    config.k_max = k_max;
    const SolveResult go = go_adm_solve(bar, State::zeros(bar), init, d, bar.reference_load(), config, c);
    EXPECT_LE(go.stats.greedy_searches, k_max);
    EXPECT_LE(go.stats.greedy_failures, go.stats.greedy_searches);
    ASSERT_FALSE(go.committed_objectives.empty());
    EXPECT_EQ(go.committed_objectives.front(), adm.objective);
    EXPECT_EQ(go.committed_objectives.back(), go.objective);
    for (std::size_t j = 1; j < go.committed_objectives.size(); ++j) {
      EXPECT_LT(go.committed_objectives[j], go.committed_objectives[j - 1]);
    }
    EXPECT_EQ(go.improved, go.committed_objectives.size() > 1);
    EXPECT_LE(go.objective, adm.objective);
    if (k_max == 0) {
      EXPECT_EQ(go.assignment, adm.assignment);
      EXPECT_EQ(go.objective, adm.objective);
      EXPECT_EQ(go.state.u, adm.state.u);
    }
  }
}

TEST(Driver, LoadSteppingRecord) {
  BenchmarkSpec spec;
  spec.alpha = 1;
  const Structure bar = build_manufactured_bar(spec, 8);
  const Dataset d = generate_linear(70e9, 65, 0.4);
  SolverConfig config;
  config.alpha = 1;
  config.load_factors = {0.25, 0.5, 0.75, 1.0};
  const RunRecord rec = solve_structure(bar, d, config, SolverKind::kGoAdm);
  ASSERT_TRUE(rec.completed());
  ASSERT_EQ(rec.steps.size(), 4u);
  EXPECT_DOUBLE_EQ(rec.c, least_squares_modulus(d));
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_DOUBLE_EQ(rec.steps[j].load_factor, config.load_factors[j]);
    EXPECT_GE(rec.steps[j].wall_seconds, 0.0);
    EXPECT_EQ(rec.steps[j].assignment.size(), 8u);
  }
  // Same inputs, same answers.
  const RunRecord again = solve_structure(bar, d, config, SolverKind::kGoAdm);
  EXPECT_EQ(again.last().assignment, rec.last().assignment);
  EXPECT_EQ(again.last().objective, rec.last().objective);
  EXPECT_EQ(to_string(SolverKind::kGoAdm), "go-adm");
  EXPECT_EQ(to_string(InitMode::kStressFree), "stress-free");
}

TEST(Driver, FailureKeepsCompletedSteps) {
  BenchmarkSpec spec;
  spec.alpha = 1;
  const Structure bar = build_manufactured_bar(spec, 8);
  const Dataset d = generate_linear(70e9, 65, 0.4);
  SolverConfig config;
  config.alpha = 1;
  config.load_factors = {0.0, 1.0};
  config.newton_max_iters = 1;
  const RunRecord rec = solve_structure(bar, d, config, SolverKind::kAdm);
  ASSERT_FALSE(rec.completed());
  EXPECT_EQ(rec.failure->code, ErrorCode::kDiverged);
  EXPECT_EQ(rec.failure->step, 1u);
  EXPECT_EQ(rec.steps.size(), 1u);
}

}  // namespace
}  // namespace ddelast
