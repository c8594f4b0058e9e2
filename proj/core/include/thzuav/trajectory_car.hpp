#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "thzuav/surrogate.hpp"
#include "thzuav/world.hpp"

namespace thzuav {

// A candidate position outside the speed disc of a temporal neighbour.
class InfeasibleCandidate : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// One powered band in slot t, linearized around the current position.
struct SlotLink
{
    int band = 0;
    int ue = 0;
    double power = 0.0;
    ExpansionPoint expansion;
    TaylorCoefficients coeffs;
};

/// Per-slot trajectory subproblem with fixed phases, allocation and powers.
struct SlotSubproblem
{
    std::shared_ptr<const Scenario> scenario;
    int slot = 0;
    Vec3 current;  // l'(t)
    Vec3 previous; // l(t-1)
    Vec3 next;     // l(t+1)
    double budget = 0.0;
    std::vector<SlotLink> links;
    std::vector<double> residual;  // R_u^{-t}, slot-summed
    std::vector<double> tightened; // R^_u^{-t}, starts equal to residual
};

// sum over s != t of UE u's slot rate.
double residual_rate(const WorldState &state, int t, int u);

SlotSubproblem build_slot_subproblem(const WorldState &state, int t);

bool is_feasible(const SlotSubproblem &sub, const Vec3 &candidate);

/// min_u (1/T) (sum of linearized-gain rates of u's powered bands + R^_u).
/// Throws InfeasibleCandidate outside either speed disc.
double surrogate_slot_objective(const Vec3 &candidate, const SlotSubproblem &sub);

/// Polar grid over the feasible lens plus the current position, then
/// coordinate refinement. Never scores below the current position.
Vec3 solve_slot_subproblem(const SlotSubproblem &sub);

/// Delta_u = true slot rate at `candidate` + R_u^{-t} - T r_th.
std::vector<double> compute_delta(const WorldState &state, int t, const Vec3 &candidate, double r_th);

struct CarReport
{
    int sweeps = 0;
    int accepted = 0;  // slot updates taken
    int fallbacks = 0; // repair loops that ended in place
    bool converged = false;
    std::vector<double> min_rate_history; // exact min average rate after each accepted update
};

// Called after every accepted slot update with the updated state and slot.
using CarObserver = std::function<void(const WorldState &, int)>;

/// Sweeps the interior slots until no position moves more than the
/// trajectory tolerance. The exact min average rate never decreases.
CarReport car_optimize(WorldState &state, const CarObserver &observer = {});

} // namespace thzuav
