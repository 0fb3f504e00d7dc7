#pragma once

#include <string>

#include <json.hpp>

#include "fcsmpc/limit_cycle.hpp"
#include "fcsmpc/sim.hpp"
#include "fcsmpc/terminal_cost.hpp"

namespace fcsmpc {

using Json = nlohmann::json;

/// Matrices travel as row-major nested arrays; `where` names the field in
/// error messages.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& where);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j, const std::string& where);

Json system_to_json(const DiscreteSystem& sys);
DiscreteSystem system_from_json(const Json& j);

Json cycle_to_json(const LimitCycle& cycle);
LimitCycle cycle_from_json(const Json& j);

Json terminal_cost_to_json(const TerminalCost& tc);

Json report_to_json(const SteadyStateReport& report);

/// One row per phase: phase, states, input bits, mode, outputs.
std::string cycle_to_csv(const LimitCycle& cycle, const DiscreteSystem& sys);

/// Header then one row per applied input:
/// k, t_seconds, x1..xn, u1..um, mode, y1..yq, J_star.
/// Numbers carry 17 significant digits so parsing them back is bit-stable.
std::string trajectory_to_csv(const Trajectory& traj);

}  // namespace fcsmpc
