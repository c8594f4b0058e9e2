#include "thzuav/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "thzuav/allocation.hpp"
#include "thzuav/phase_opt.hpp"
#include "thzuav/trajectory_car.hpp"

namespace thzuav {

std::string to_string(RunMode mode)
{
    switch (mode)
    {
    case RunMode::proposed: return "proposed";
    case RunMode::pwch_fixed: return "pwch-fixed";
    case RunMode::theta_fixed: return "theta-fixed";
    case RunMode::traject_fixed: return "traject-fixed";
    }
    throw std::invalid_argument("unknown run mode");
}

RunMode parse_run_mode(std::string_view text)
{
    std::string s(text);
    std::replace(s.begin(), s.end(), '_', '-');
    for (RunMode m : kAllModes)
        if (s == to_string(m))
            return m;
    throw std::invalid_argument("unknown mode '" + std::string(text) +
                                "' (expected proposed, pwch-fixed, theta-fixed or traject-fixed)");
}

std::vector<Vec3> initial_trajectory(const Scenario &scenario)
{
    const int T = scenario.slot_count();
    const Vec3 start = scenario.uav.start();
    const double R = initial_orbit_radius(scenario.uav);
    Vec3 c = ue_centroid(scenario.ues);

    double dx = c.x - start.x, dy = c.y - start.y, len = std::hypot(dx, dy);
    if (len == 0.0)
    {
        dx = -1.0;
        dy = 0.0;
        len = 1.0;
    }
    Vec3 center{start.x + R * dx / len, start.y + R * dy / len, start.z};
    double phase0 = std::atan2(start.y - center.y, start.x - center.x);

    std::vector<Vec3> path(static_cast<std::size_t>(T), start);
    for (int t = 1; t + 1 < T; ++t)
    {
        double a = phase0 + kTwoPi * t / (T - 1);
        path[t] = {center.x + R * std::cos(a), center.y + R * std::sin(a), start.z};
    }
    return path;
}

WorldState initialize(std::shared_ptr<const Scenario> scenario, std::uint64_t seed)
{
    const Scenario &s = *scenario;
    WorldState state;
    state.scenario = std::move(scenario);
    state.trajectory = initial_trajectory(s);

    Rng rng(seed);
    state.phases = random_phases(s, rng);

    state.plan = AllocationPlan(s.slot_count(), s.band_count());
    for (int i = 0; i < s.band_count(); ++i)
        state.plan.owner[i] = i % s.ue_count();
    std::fill(state.plan.power.begin(), state.plan.power.end(), s.uav.max_power_w / s.band_count());
    return state;
}

AllocationPlan random_plan(const Scenario &s, Rng &rng)
{
    const int I = s.band_count(), U = s.ue_count();
    AllocationPlan plan(s.slot_count(), I);

    std::vector<int> order(static_cast<std::size_t>(I));
    std::iota(order.begin(), order.end(), 0);
    for (int k = I - 1; k > 0; --k)
        std::swap(order[k], order[rng.below(static_cast<std::uint64_t>(k) + 1)]);
    for (int k = 0; k < I; ++k)
        plan.owner[order[k]] = k < U ? k : static_cast<int>(rng.below(static_cast<std::uint64_t>(U)));

    for (int t = 0; t < s.slot_count(); ++t)
    {
        auto p = plan.slot_powers(t);
        double sum = 0.0;
        for (auto &x : p)
            sum += x = rng.uniform();
        if (sum == 0.0)
        {
            std::fill(p.begin(), p.end(), s.uav.max_power_w / I);
            continue;
        }
        for (auto &x : p)
            x *= s.uav.max_power_w / sum;
    }
    return plan;
}

PhaseSchedule random_phases(const Scenario &s, Rng &rng)
{
    PhaseSchedule phases(s.slot_count(), s.element_count());
    for (int t = 0; t < s.slot_count(); ++t)
        for (int n = 0; n < s.element_count(); ++n)
            phases.set(t, n, rng.uniform(0.0, kTwoPi));
    return phases;
}

RunTrace run(WorldState &state, RunMode mode, std::uint64_t seed)
{
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const Scenario &s = state.world();

    RunTrace trace;
    trace.mode = mode;
    trace.seed = seed;
    Rng baseline_rng(seed, 1);

    auto record = [&](int m) {
        IterationRecord r;
        r.iteration = m;
        r.ue_rates = average_rates(state);
        r.r_th = *std::min_element(r.ue_rates.begin(), r.ue_rates.end());
        r.best_r_th = trace.records.empty() ? r.r_th : std::max(trace.records.back().best_r_th, r.r_th);
        r.elapsed_s = std::chrono::duration<double>(clock::now() - t0).count();
        trace.records.push_back(std::move(r));
        trace.snapshots.push_back(state);
    };
    record(0);

    for (int m = 1; m <= s.limits.outer_max_iters; ++m)
    {
        if (mode == RunMode::pwch_fixed)
            state.plan = random_plan(s, baseline_rng);
        else
            state.plan = solve_allocation(state).plan;

        if (mode != RunMode::traject_fixed)
            car_optimize(state);

        if (mode == RunMode::theta_fixed)
            state.phases = random_phases(s, baseline_rng);
        else
            optimize_phases(state);

        double previous = trace.records.back().r_th;
        record(m);
        double change = std::fabs(trace.records.back().r_th - previous);
        if (change <= s.tol.outer_rel * std::max(previous, std::numeric_limits<double>::min()))
        {
            trace.converged = true;
            break;
        }
    }
    trace.wall_time_s = std::chrono::duration<double>(clock::now() - t0).count();
    return trace;
}

} // namespace thzuav
