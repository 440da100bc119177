#pragma once

#include "l0erm/metrics.hpp"
#include "l0erm/solver.hpp"

#include <json.hpp>

namespace l0erm {

/// {"objective", "support", "solution", "iters_run", "converged", "step_size",
///  "min_margin", "debiased"?}. Non-finite numbers are written as strings.
nlohmann::json to_json(const SolveReport& report);
nlohmann::json to_json(const StabilityReport& report);
nlohmann::json to_json(const RiskReport& report);

/// Parses the fields written by to_json(SolveReport); the trace is not serialized.
SolveReport solve_report_from_json(const nlohmann::json& doc);

}  // namespace l0erm
