#include "thzuav/trajectory_car.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thzuav {

namespace {

double sum_except(const std::vector<std::vector<double>> &table, int t, int u)
{
    double sum = 0.0;
    for (int s = 0; s < static_cast<int>(table.size()); ++s)
        if (s != t)
            sum += table[s][u];
    return sum;
}

// Mirrors average_rates(state): accumulate slot by slot, then divide.
double min_average(const std::vector<std::vector<double>> &table, int ues)
{
    std::vector<double> avg(static_cast<std::size_t>(ues), 0.0);
    for (const auto &row : table)
        for (int u = 0; u < ues; ++u)
            avg[u] += row[u];
    double worst = std::numeric_limits<double>::infinity();
    for (double a : avg)
        worst = std::min(worst, a / static_cast<double>(table.size()));
    return worst;
}

SlotSubproblem build_from_table(const WorldState &state, int t, const std::vector<std::vector<double>> &table)
{
    const Scenario &s = state.world();
    const int T = s.slot_count();
    SlotSubproblem sub;
    sub.scenario = state.scenario;
    sub.slot = t;
    sub.current = state.trajectory[t];
    // Boundary slots only see the anchor on their open side.
    sub.previous = t > 0 ? state.trajectory[t - 1] : s.uav.start();
    sub.next = t + 1 < T ? state.trajectory[t + 1] : s.uav.start();
    sub.budget = s.uav.travel_budget_m();

    auto phases = state.phases.row(t);
    for (int i = 0; i < s.band_count(); ++i)
    {
        double p = state.plan.power_at(t, i);
        if (p <= 0.0)
            continue;
        SlotLink link;
        link.band = i;
        link.ue = state.plan.owner[i];
        link.power = p;
        link.expansion = make_expansion_point(s, sub.current, phases, i, link.ue);
        link.coeffs = taylor_coefficients(link.expansion);
        sub.links.push_back(link);
    }
    sub.residual.resize(static_cast<std::size_t>(s.ue_count()));
    for (int u = 0; u < s.ue_count(); ++u)
        sub.residual[u] = sum_except(table, t, u);
    sub.tightened = sub.residual;
    return sub;
}

// Surrogate objective without the feasibility check. `scratch` avoids
// reallocation inside the search loops.
double objective_unchecked(const Vec3 &candidate, const SlotSubproblem &sub, std::vector<double> &scratch)
{
    const Scenario &s = *sub.scenario;
    const int U = s.ue_count();
    scratch.resize(2 * static_cast<std::size_t>(U));
    double *total = scratch.data(), *ue_distance = scratch.data() + U;
    for (int u = 0; u < U; ++u)
    {
        total[u] = sub.tightened[u];
        ue_distance[u] = distance(candidate, s.ues[u]);
    }
    const double irs_distance = distance(candidate, s.irs.anchor());

    for (const auto &link : sub.links)
    {
        double gain = std::max(0.0, linearized_gain(link.coeffs, ue_distance[link.ue], irs_distance));
        total[link.ue] += link_rate(link.power, gain, s.bands[link.band]);
    }
    return *std::min_element(total, total + U) / s.slot_count();
}

double objective_unchecked(const Vec3 &candidate, const SlotSubproblem &sub)
{
    std::vector<double> scratch;
    return objective_unchecked(candidate, sub, scratch);
}

} // namespace

double residual_rate(const WorldState &state, int t, int u) { return sum_except(slot_rates(state), t, u); }

SlotSubproblem build_slot_subproblem(const WorldState &state, int t)
{
    return build_from_table(state, t, slot_rates(state));
}

bool is_feasible(const SlotSubproblem &sub, const Vec3 &candidate)
{
    return planar_distance(candidate, sub.previous) <= sub.budget &&
           planar_distance(candidate, sub.next) <= sub.budget;
}

double surrogate_slot_objective(const Vec3 &candidate, const SlotSubproblem &sub)
{
    if (!is_feasible(sub, candidate))
        throw InfeasibleCandidate("candidate position violates the per-slot travel budget");
    return objective_unchecked(candidate, sub);
}

Vec3 solve_slot_subproblem(const SlotSubproblem &sub)
{
    const Scenario &s = *sub.scenario;
    Vec3 best = sub.current;
    if (!(sub.budget > 0.0))
        return best;
    std::vector<double> scratch;
    double best_value = objective_unchecked(best, sub, scratch);

    auto consider = [&](const Vec3 &c) {
        if (!is_feasible(sub, c))
            return false;
        double value = objective_unchecked(c, sub, scratch);
        if (value > best_value)
        {
            best_value = value;
            best = c;
            return true;
        }
        return false;
    };

    const double altitude = sub.current.z;
    Vec3 mid{0.5 * (sub.previous.x + sub.next.x), 0.5 * (sub.previous.y + sub.next.y), altitude};
    double half_gap = 0.5 * planar_distance(sub.previous, sub.next);
    double radius = std::sqrt(std::max(0.0, sub.budget * sub.budget - half_gap * half_gap));

    consider(mid);
    const int radii = s.limits.search_radii, angles = s.limits.search_angles;
    for (int k = 1; k <= radii; ++k)
    {
        double rho = radius * k / radii;
        for (int j = 0; j < angles; ++j)
        {
            double a = kTwoPi * j / angles;
            consider({mid.x + rho * std::cos(a), mid.y + rho * std::sin(a), altitude});
        }
    }

    double step = sub.budget / 8.0;
    for (int round = 0; round < s.limits.refine_rounds; ++round)
    {
        Vec3 origin = best;
        bool moved = false;
        for (auto [dx, dy] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}})
            moved = consider({origin.x + dx * step, origin.y + dy * step, altitude}) || moved;
        if (!moved)
            step *= 0.5;
    }
    return best;
}

std::vector<double> compute_delta(const WorldState &state, int t, const Vec3 &candidate, double r_th)
{
    const Scenario &s = state.world();
    auto table = slot_rates(state);
    auto reflect = reflection_coefficients(state.phases.row(t));
    std::vector<double> delta(static_cast<std::size_t>(s.ue_count()));
    for (int u = 0; u < s.ue_count(); ++u)
        delta[u] = slot_rate(s, state.plan, reflect, t, candidate, u) + sum_except(table, t, u) -
                   s.slot_count() * r_th;
    return delta;
}

CarReport car_optimize(WorldState &state, const CarObserver &observer)
{
    const Scenario &s = state.world();
    const int T = s.slot_count(), U = s.ue_count();
    CarReport report;

    std::vector<std::vector<cplx>> reflect(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t)
        reflect[t] = reflection_coefficients(state.phases.row(t));
    auto table = slot_rates(state);
    double current_min = min_average(table, U);

    for (int sweep = 1; sweep <= s.limits.car_max_sweeps; ++sweep)
    {
        report.sweeps = sweep;
        double moved = 0.0;
        for (int t = 1; t + 1 < T; ++t)
        {
            SlotSubproblem sub = build_from_table(state, t, table);
            const double target = T * current_min;
            bool accepted = false;

            for (int round = 0; round < s.limits.car_max_repair_rounds; ++round)
            {
                Vec3 candidate = solve_slot_subproblem(sub);
                double value = objective_unchecked(candidate, sub);
                double reference = objective_unchecked(sub.current, sub);
                if (!(value > reference + 1e-12 * std::fabs(reference)))
                    break; // tightened problem cannot beat staying put

                std::vector<double> row(static_cast<std::size_t>(U));
                bool violated = false;
                std::vector<double> delta(static_cast<std::size_t>(U));
                for (int u = 0; u < U; ++u)
                {
                    row[u] = slot_rate(s, state.plan, reflect[t], t, candidate, u);
                    delta[u] = row[u] + sub.residual[u] - target;
                    violated = violated || delta[u] < 0.0;
                }
                if (violated)
                {
                    for (int u = 0; u < U; ++u)
                        if (delta[u] < 0.0)
                            sub.tightened[u] += delta[u];
                    continue;
                }

                auto trial = table;
                trial[t] = row;
                double trial_min = min_average(trial, U);
                if (trial_min >= current_min)
                {
                    moved = std::max(moved, planar_distance(candidate, state.trajectory[t]));
                    state.trajectory[t] = candidate;
                    table = std::move(trial);
                    current_min = trial_min;
                    accepted = true;
                }
                break;
            }

            if (accepted)
            {
                ++report.accepted;
                report.min_rate_history.push_back(current_min);
                if (observer)
                    observer(state, t);
            }
            else
            {
                ++report.fallbacks;
            }
        }
        if (moved <= s.tol.trajectory_m)
        {
            report.converged = true;
            break;
        }
    }
    return report;
}

} // namespace thzuav
