#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ddelast/dataset.hpp"
#include "ddelast/solvers.hpp"
#include "ddelast/structure.hpp"

namespace ddelast {

/// ||u_h - u_ref|| / ||u_ref|| in L2(0, L0) for the manufactured bar, with u_h interpolated
/// linearly per element and both integrals evaluated by 3-point Gauss quadrature.
double relative_l2_error(const Structure& bar, const Eigen::VectorXd& u, const BenchmarkSpec& spec);

/// Largest strain of the manufactured reference solution (attained at the supports).
double reference_strain_max(const BenchmarkSpec& spec);

struct ConvergenceOptions {
  BenchmarkSpec spec;
  std::vector<std::size_t> elements;
  std::vector<std::size_t> data_points;  ///< odd sizes of the symmetric linear dataset
  SolverKind solver = SolverKind::kAdm;
  SolverConfig config;                   ///< alpha is taken from spec
  double strain_range_factor = 1.5;      ///< dataset covers this multiple of reference_strain_max
};

struct ConvergenceCell {
  std::size_t elements = 0;
  std::size_t data_points = 0;
  double error = 0.0;
  double objective = 0.0;
  bool converged = false;
  std::string failure;
};

/// Cells in row-major order: all dataset sizes for elements[0], then elements[1], ...
struct ConvergenceTable {
  std::vector<std::size_t> elements;
  std::vector<std::size_t> data_points;
  std::vector<ConvergenceCell> cells;

  const ConvergenceCell& at(std::size_t element_row, std::size_t data_column) const {
    return cells[element_row * data_points.size() + data_column];
  }
};

/// Relative L2 displacement error of the data-driven solution over a grid of mesh sizes
/// and dataset sizes. Failed cells are kept with converged = false.
ConvergenceTable run_convergence_study(const ConvergenceOptions& options);

/// elements,data_points,relative_l2_error,objective,converged
void write_convergence_csv(const ConvergenceTable& table, std::ostream& out);

/// Shape of a synthetic cyclic tension test: first loading from zero to the peak force,
/// unloading to `min_force`, reloading to the peak. Loading follows a stiffening curve,
/// unloading a straight line with `unloading_modulus`, reloading a convex curve between
/// the unloading end point and a slightly larger peak strain.
struct CyclicTestSpec {
  double area = 0.0;                 ///< m^2, converts force to stress
  double peak_force = 1.2e6;         ///< N
  double min_force = 1.2e5;          ///< N
  double loading_modulus = 3e9;      ///< Pa, tangent at high load
  double slack_strain = 4e-3;        ///< extra strain taken up at low load
  double slack_stress = 4e6;         ///< Pa, stress scale of the slack
  double unloading_modulus = 6e9;    ///< Pa
  double ratchet = 0.02;             ///< relative growth of the peak strain after reloading
  double reload_exponent = 1.6;
  std::size_t points_per_branch = 40;
  double seconds_per_point = 0.5;
};

/// Rows of the synthetic cyclic test.
struct CyclicTest {
  std::vector<double> time;    ///< s
  std::vector<double> force;   ///< N
  std::vector<double> strain;
  std::vector<IndexRange> phases;  ///< first loading, unloading, reloading
};

CyclicTest generate_cyclic_test(const CyclicTestSpec& spec);
/// time_s,force_N,strain with a '#' comment naming the phase ranges.
void write_cyclic_csv(const CyclicTest& test, std::ostream& out);

struct RopeOptions {
  double length = 17.010;     ///< m
  double diameter = 0.208;    ///< m
  std::size_t elements = 16;
  int alpha = 1;
  SolverKind solver = SolverKind::kAdm;
  SolverConfig config;        ///< alpha and load_factors are overridden
  bool prepend_origin = false;
  bool force = false;         ///< accept sub-datasets that fail the consistency check
  std::vector<std::string> phase_names{"first-loading", "unloading", "reloading"};
};

struct RopePhase {
  std::string name;
  Dataset data;
  ConsistencyReport data_check;
  RunRecord record;
  bool warm_started = false;
  std::vector<double> forces;       ///< N, one per load step
  std::vector<double> deflections;  ///< m, end displacement per load step
  ConsistencyReport state_check;    ///< monotonicity of the computed element states
};

struct RopeResult {
  std::vector<RopePhase> phases;
  double hysteresis_area = 0.0;  ///< N*m, enclosed by the phases after the first
  bool completed = true;
};

double rope_area(const RopeOptions& options);

/// Fixed-free bar pulled at its free end. Each phase runs on its own sub-dataset; the row
/// forces (stress times area) are the load steps. Phases after the first start from the
/// previous phase's final state, with the assignment re-derived on the new sub-dataset.
/// Throws kConfig for an inconsistent sub-dataset unless options.force is set.
RopeResult run_rope(const Dataset& data, std::span<const IndexRange> ranges, const RopeOptions& options);

/// Absolute area of the closed polygon through the given points (shoelace formula).
double polygon_area(std::span<const double> x, std::span<const double> y);

/// phase,step,force_N,deflection_m,objective
void write_load_deflection_csv(const RopeResult& result, std::ostream& out);

}  // namespace ddelast
