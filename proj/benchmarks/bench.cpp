#include <benchmark/benchmark.h>

#include "thzuav/allocation.hpp"
#include "thzuav/engine.hpp"
#include "thzuav/phase_opt.hpp"
#include "thzuav/trajectory_car.hpp"

using namespace thzuav;

namespace {

const std::shared_ptr<const Scenario> &world()
{
    static const auto s = std::make_shared<const Scenario>(default_scenario());
    return s;
}

void BM_LinkGain(benchmark::State &st)
{
    WorldState w = initialize(world(), 1);
    auto reflect = reflection_coefficients(w.phases.row(3));
    for (auto _ : st)
        benchmark::DoNotOptimize(link_gain(*world(), w.trajectory[3], reflect, 7, 2));
}
BENCHMARK(BM_LinkGain);

void BM_GainTable(benchmark::State &st)
{
    WorldState w = initialize(world(), 1);
    for (auto _ : st)
        benchmark::DoNotOptimize(gain_table(*world(), w.trajectory, w.phases));
}
BENCHMARK(BM_GainTable)->Unit(benchmark::kMillisecond);

void BM_Allocation(benchmark::State &st)
{
    WorldState w = initialize(world(), 1);
    for (auto _ : st)
        benchmark::DoNotOptimize(solve_allocation(w));
}
BENCHMARK(BM_Allocation)->Unit(benchmark::kMillisecond);

void BM_PhaseSlot(benchmark::State &st)
{
    WorldState w = initialize(world(), 1);
    w.plan = solve_allocation(w).plan;
    for (auto _ : st)
        benchmark::DoNotOptimize(optimize_phases_slot(w, 10));
}
BENCHMARK(BM_PhaseSlot)->Unit(benchmark::kMillisecond);

void BM_CarOptimize(benchmark::State &st)
{
    WorldState base = initialize(world(), 1);
    base.plan = solve_allocation(base).plan;
    for (auto _ : st)
    {
        WorldState w = base;
        benchmark::DoNotOptimize(car_optimize(w));
    }
}
BENCHMARK(BM_CarOptimize)->Unit(benchmark::kMillisecond)->Iterations(3);

} // namespace

BENCHMARK_MAIN();
