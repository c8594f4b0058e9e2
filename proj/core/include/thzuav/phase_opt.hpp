#pragma once

#include <span>
#include <vector>

#include "thzuav/world.hpp"

namespace thzuav {

// s = sum_n v_n exp(j phi_n). Throws std::invalid_argument on length mismatch.
cplx effective_scalar(std::span<const cplx> v, std::span<const double> phases);

// U(s) = G + F |s|^2 + Re{Q s}
double surrogate_value(cplx s, double G, double F, cplx Q);

/// Linear minorant of U at s~: U(s) >= U(s~) + Re{upsilon (s - s~)}.
/// The gain floor H enters through chi = Re{upsilon s~} - U(s~) + H, so the
/// floor constraint reads Re{upsilon s} - chi >= 0.
struct Minorant
{
    cplx upsilon;
    double chi = 0.0;
};

Minorant minorant_coefficients(cplx s_tilde, double G, double F, cplx Q, double gain_floor);

// Value of the minorant at s.
inline double minorant_value(const Minorant &m, cplx s, double gain_floor)
{
    return std::real(m.upsilon * s) - m.chi + gain_floor;
}

/// One reflected link inside a slot: its minorant slope and array response.
struct PricedLink
{
    cplx upsilon;
    std::span<const cplx> v;
};

/// Per-element maximizer of sum_i price_i Re{upsilon_i v_i . phi}:
/// phi_n = angle(Xi_n) with Xi_n = sum_i price_i conj(upsilon_i) conj(v_{i,n}),
/// mapped to [0, 2pi); phi_n = 0 where Xi_n vanishes.
std::vector<double> closed_form_phases(std::span<const double> prices, std::span<const PricedLink> links);

// Projected subgradient step rho_i <- max(0, rho_i - step * surplus_i).
void pricing_update(std::span<double> prices, std::span<const double> surplus, double step);

// Diminishing schedule tau0 / sqrt(s), s >= 1.
inline double pricing_step(double tau0, int s) { return tau0 / std::sqrt(static_cast<double>(s)); }

struct PhaseSlotResult
{
    std::vector<double> phases;
    int iterations = 0;
    bool accepted = false;     // false: incoming phases returned
    double improvement = 0.0;  // min over links of (gain - floor) / floor
};

/// Inner pricing loop for slot t. Links are the bands carrying power in t.
/// The result never lowers any of those links' exact gains below the gains
/// obtained with the incoming phases.
PhaseSlotResult optimize_phases_slot(const WorldState &state, int t);

// Runs optimize_phases_slot for every slot and stores the results.
int optimize_phases(WorldState &state);

} // namespace thzuav
