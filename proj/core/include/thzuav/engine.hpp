#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "thzuav/rng.hpp"
#include "thzuav/world.hpp"

namespace thzuav {

enum class RunMode
{
    proposed,
    pwch_fixed,    // bands and powers re-drawn at random each iteration
    theta_fixed,   // phases re-drawn at random each iteration
    traject_fixed, // trajectory frozen at its initial circle
};

std::string to_string(RunMode mode);
// Accepts both "pwch-fixed" and "pwch_fixed" spellings. Throws std::invalid_argument.
RunMode parse_run_mode(std::string_view text);
inline constexpr RunMode kAllModes[] = {RunMode::proposed, RunMode::pwch_fixed, RunMode::theta_fixed,
                                        RunMode::traject_fixed};

// Closed circle through the start anchor, centred towards the UE centroid,
// traversed once over the horizon. First and last points equal the anchor.
std::vector<Vec3> initial_trajectory(const Scenario &scenario);

/// Circle trajectory, uniform random phases, round-robin bands, equal power.
WorldState initialize(std::shared_ptr<const Scenario> scenario, std::uint64_t seed);

// Every UE gets at least one band; per-slot powers are random and sum to p_max.
AllocationPlan random_plan(const Scenario &scenario, Rng &rng);
PhaseSchedule random_phases(const Scenario &scenario, Rng &rng);

struct IterationRecord
{
    int iteration = 0; // 0 = initial state
    double r_th = 0.0; // exact min average rate after this iteration
    double best_r_th = 0.0;
    std::vector<double> ue_rates;
    double elapsed_s = 0.0;
};

struct RunTrace
{
    RunMode mode = RunMode::proposed;
    std::uint64_t seed = 0;
    std::vector<IterationRecord> records;
    std::vector<WorldState> snapshots; // state after each record
    bool converged = false;
    double wall_time_s = 0.0;

    int iterations() const { return static_cast<int>(records.size()) - 1; }
    double final_r_th() const { return records.back().r_th; }
    double best_r_th() const { return records.back().best_r_th; }
};

/// Block-coordinate outer loop: allocation, trajectory, phases, until the
/// relative change of the min average rate is within tolerance or the
/// iteration cap is hit. `state` ends as the last iterate.
RunTrace run(WorldState &state, RunMode mode, std::uint64_t seed);

} // namespace thzuav
