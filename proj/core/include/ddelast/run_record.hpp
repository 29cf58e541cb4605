#pragma once

#include <iosfwd>
#include <string>

#include "ddelast/dataset.hpp"
#include "ddelast/oracle.hpp"
#include "ddelast/solvers.hpp"
#include "ddelast/structure.hpp"

namespace ddelast {

/// Run record as JSON text (layout in docs/run_record.schema.json). Solver states are
/// included per step when `include_states` is set.
std::string run_record_json(const RunRecord& record, bool include_states = true);

/// Plot data of one load step. All numbers are written with round-trip precision.
/// node,x_ref,y_ref,u_x,u_y,x,y
void write_deformed_csv(const Structure& structure, const State& state, std::ostream& out);
/// element,strain,stress,data_index,data_strain,data_stress,objective
void write_element_csv(const Structure& structure, const StepRecord& step, const Dataset& data, double c,
                       std::ostream& out);
/// index,strain,stress,assigned_elements
void write_overlay_csv(const Dataset& data, const Assignment& assignment, std::ostream& out);
/// step,load_factor,objective,newton_iterations,adm_iterations,greedy_searches,improved,wall_seconds
void write_objective_csv(const RunRecord& record, std::ostream& out);

}  // namespace ddelast
