#pragma once

#include <memory>
#include <span>
#include <vector>

#include "thzuav/channel.hpp"
#include "thzuav/scenario.hpp"

namespace thzuav {

/// Sub-band ownership (one UE per band, fixed for the horizon) and per-slot
/// transmit powers.
struct AllocationPlan
{
    std::vector<int> owner;    // band -> UE
    int slots = 0;
    std::vector<double> power; // slots x bands, row-major

    AllocationPlan() = default;
    AllocationPlan(int slot_count, int band_count)
        : owner(static_cast<std::size_t>(band_count), 0), slots(slot_count),
          power(static_cast<std::size_t>(slot_count) * band_count, 0.0)
    {
    }

    int bands() const { return static_cast<int>(owner.size()); }
    bool assigned(int band, int ue) const { return owner[band] == ue; }
    double power_at(int t, int band) const { return power[static_cast<std::size_t>(t) * bands() + band]; }
    double &power_at(int t, int band) { return power[static_cast<std::size_t>(t) * bands() + band]; }
    std::span<const double> slot_powers(int t) const
    {
        return {power.data() + static_cast<std::size_t>(t) * bands(), static_cast<std::size_t>(bands())};
    }
    std::span<double> slot_powers(int t)
    {
        return {power.data() + static_cast<std::size_t>(t) * bands(), static_cast<std::size_t>(bands())};
    }

    friend bool operator==(const AllocationPlan &, const AllocationPlan &) = default;
};

/// Everything the block optimizers read and write.
struct WorldState
{
    std::shared_ptr<const Scenario> scenario;
    std::vector<Vec3> trajectory;
    PhaseSchedule phases;
    AllocationPlan plan;

    const Scenario &world() const { return *scenario; }

    friend bool operator==(const WorldState &a, const WorldState &b)
    {
        return *a.scenario == *b.scenario && a.trajectory == b.trajectory && a.phases == b.phases &&
               a.plan == b.plan;
    }
};

// Rate of UE `ue` in slot `t` if the UAV were at `uav` (bit/s).
double slot_rate(const Scenario &scenario, const AllocationPlan &plan, std::span<const cplx> reflection, int t,
                 const Vec3 &uav, int ue);

// Per-UE slot rates under the stored state; outer index is the slot.
std::vector<std::vector<double>> slot_rates(const WorldState &state);

// (1/T) sum_t sum_i alpha_{i,u} R_{i,u}(t) from a precomputed gain table.
std::vector<double> average_rates(const Scenario &scenario, const AllocationPlan &plan, const GainTable &gains);
std::vector<double> average_rates(const WorldState &state);

// min_u of average_rates(state), always from freshly evaluated channel gains.
double exact_min_avg_rate(const WorldState &state);

} // namespace thzuav
