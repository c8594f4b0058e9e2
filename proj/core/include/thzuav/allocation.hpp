#pragma once

#include <span>
#include <vector>

#include "thzuav/world.hpp"

namespace thzuav {

// Euclidean projection onto {w : w >= 0, sum w = 1}.
std::vector<double> project_to_simplex(std::span<const double> point);

/// Weighted water-filling for one slot:
///   maximize sum_i weight_i B_i log2(1 + p_i gamma_i)  s.t.  sum p_i <= p_max, p >= 0
/// with gamma_i = gain_i / (S_N_i B_i). `band_weights[i]` is the weight of
/// the UE that owns band i. Bands with zero gain or zero weight get no power.
std::vector<double> waterfill_slot(std::span<const SubBand> bands, std::span<const double> band_gains,
                                   std::span<const double> band_weights, double max_power_w);

// Each band goes to argmax_u w_u sum_t B_i log2(1 + (p_max/I) gamma_{i,u}(t));
// ties resolve to the lowest UE index.
std::vector<int> assign_bands(const Scenario &scenario, const GainTable &gains, std::span<const double> weights);

// Water-fills every slot for a fixed assignment and UE weights.
AllocationPlan waterfill_plan(const Scenario &scenario, const GainTable &gains, std::vector<int> owner,
                              std::span<const double> weights);

struct AllocationResult
{
    AllocationPlan plan;
    double r_th = 0.0; // min_u average rate under `plan`
    std::vector<double> ue_rates;
    std::vector<double> weights; // final dual weights
    int iterations = 0;
    bool improved = false; // false when the incoming plan was kept
};

/// Max-min sub-band assignment and power control for fixed channel gains by
/// dual subgradient on the UE weights. Never returns a plan worse than
/// `incoming`.
AllocationResult solve_allocation(const Scenario &scenario, const GainTable &gains, const AllocationPlan &incoming);
AllocationResult solve_allocation(const WorldState &state);

} // namespace thzuav
