#pragma once

#include <filesystem>
#include <string>

#include "thzuav/engine.hpp"

namespace thzuav {

// Shortest decimal that parses back to the same double.
std::string format_double(double value);

// slot,x_m,y_m with 1-based slots.
std::string trajectory_csv(const std::vector<Vec3> &trajectory);
// iter,r_th_bps,rate_u1_bps,...,rate_uU_bps; row 0 is the initial state.
std::string convergence_csv(const RunTrace &trace);
std::string summary_json(const RunTrace &trace, const Scenario &scenario);

/// Writes trajectory.csv, convergence.csv and summary.json into `dir`,
/// creating it if needed. Throws std::runtime_error on I/O failure.
void write_artifacts(const std::filesystem::path &dir, const RunTrace &trace, const WorldState &final_state);

} // namespace thzuav
