#include "thzuav/world.hpp"

#include <algorithm>

namespace thzuav {

double slot_rate(const Scenario &scenario, const AllocationPlan &plan, std::span<const cplx> reflection, int t,
                 const Vec3 &uav, int ue)
{
    double rate = 0.0;
    for (int i = 0; i < plan.bands(); ++i)
    {
        double p = plan.power_at(t, i);
        if (plan.owner[i] != ue || p <= 0.0)
            continue;
        rate += link_rate(p, link_gain(scenario, uav, reflection, i, ue), scenario.bands[i]);
    }
    return rate;
}

std::vector<std::vector<double>> slot_rates(const WorldState &state)
{
    const Scenario &s = state.world();
    std::vector<std::vector<double>> out(static_cast<std::size_t>(s.slot_count()));
    for (int t = 0; t < s.slot_count(); ++t)
    {
        auto reflect = reflection_coefficients(state.phases.row(t));
        out[t].resize(static_cast<std::size_t>(s.ue_count()));
        for (int u = 0; u < s.ue_count(); ++u)
            out[t][u] = slot_rate(s, state.plan, reflect, t, state.trajectory[t], u);
    }
    return out;
}

std::vector<double> average_rates(const Scenario &scenario, const AllocationPlan &plan, const GainTable &gains)
{
    // Same summation order as slot_rate + average_rates(state) so that both
    // paths give bit-identical results for the same gains.
    const int U = scenario.ue_count();
    std::vector<double> rates(static_cast<std::size_t>(U), 0.0), slot(static_cast<std::size_t>(U));
    for (int t = 0; t < gains.slots(); ++t)
    {
        std::fill(slot.begin(), slot.end(), 0.0);
        for (int i = 0; i < plan.bands(); ++i)
        {
            int u = plan.owner[i];
            double p = plan.power_at(t, i);
            if (p > 0.0)
                slot[u] += link_rate(p, gains(t, i, u), scenario.bands[i]);
        }
        for (int u = 0; u < U; ++u)
            rates[u] += slot[u];
    }
    for (auto &r : rates)
        r /= gains.slots();
    return rates;
}

std::vector<double> average_rates(const WorldState &state)
{
    const Scenario &s = state.world();
    std::vector<double> rates(static_cast<std::size_t>(s.ue_count()), 0.0);
    for (const auto &row : slot_rates(state))
        for (int u = 0; u < s.ue_count(); ++u)
            rates[u] += row[u];
    for (auto &r : rates)
        r /= s.slot_count();
    return rates;
}

double exact_min_avg_rate(const WorldState &state)
{
    auto rates = average_rates(state);
    return *std::min_element(rates.begin(), rates.end());
}

} // namespace thzuav
