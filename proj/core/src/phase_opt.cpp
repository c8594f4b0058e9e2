#include "thzuav/phase_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace thzuav {

cplx effective_scalar(std::span<const cplx> v, std::span<const double> phases)
{
    if (v.size() != phases.size())
        throw std::invalid_argument("effective_scalar: response and phase lengths differ");
    cplx s;
    for (std::size_t n = 0; n < v.size(); ++n)
        s += v[n] * std::polar(1.0, phases[n]);
    return s;
}

double surrogate_value(cplx s, double G, double F, cplx Q) { return G + F * std::norm(s) + std::real(Q * s); }

Minorant minorant_coefficients(cplx s_tilde, double G, double F, cplx Q, double gain_floor)
{
    Minorant m;
    m.upsilon = 2.0 * F * std::conj(s_tilde) + Q;
    m.chi = std::real(m.upsilon * s_tilde) - surrogate_value(s_tilde, G, F, Q) + gain_floor;
    return m;
}

std::vector<double> closed_form_phases(std::span<const double> prices, std::span<const PricedLink> links)
{
    if (prices.size() != links.size())
        throw std::invalid_argument("closed_form_phases: one price per link required");
    if (links.empty())
        return {};
    const std::size_t N = links.front().v.size();
    std::vector<cplx> xi(N);
    for (std::size_t i = 0; i < links.size(); ++i)
    {
        if (links[i].v.size() != N)
            throw std::invalid_argument("closed_form_phases: response lengths differ");
        cplx weight = prices[i] * std::conj(links[i].upsilon);
        for (std::size_t n = 0; n < N; ++n)
            xi[n] += weight * std::conj(links[i].v[n]);
    }
    std::vector<double> phases(N, 0.0);
    for (std::size_t n = 0; n < N; ++n)
        phases[n] = xi[n] == cplx{} ? 0.0 : wrap_phase(std::arg(xi[n]));
    return phases;
}

void pricing_update(std::span<double> prices, std::span<const double> surplus, double step)
{
    if (prices.size() != surplus.size())
        throw std::invalid_argument("pricing_update: one surplus per price required");
    for (std::size_t i = 0; i < prices.size(); ++i)
        prices[i] = std::max(0.0, prices[i] - step * surplus[i]);
}

namespace {

struct SlotLink
{
    int band = 0;
    int ue = 0;
    GainDecomposition gain;
    double floor = 0.0;
};

// min over links of the relative change of the exact gain against the floors.
// Uses link_gain, the same evaluation the rate bookkeeping uses, so a positive
// result can never lower a recorded rate through rounding.
double relative_improvement(const Scenario &s, const Vec3 &uav, std::span<const SlotLink> links,
                            std::span<const double> phases)
{
    auto reflect = reflection_coefficients(phases);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto &link : links)
    {
        double gain = link_gain(s, uav, reflect, link.band, link.ue);
        double scale = link.floor > 0.0 ? link.floor : 1.0;
        worst = std::min(worst, (gain - link.floor) / scale);
    }
    return worst;
}

} // namespace

PhaseSlotResult optimize_phases_slot(const WorldState &state, int t)
{
    const Scenario &s = state.world();
    auto incoming = state.phases.row(t);
    const Vec3 &uav = state.trajectory[t];

    PhaseSlotResult result;
    result.phases.assign(incoming.begin(), incoming.end());

    std::vector<SlotLink> links;
    for (int i = 0; i < s.band_count(); ++i)
    {
        if (state.plan.power_at(t, i) <= 0.0)
            continue;
        SlotLink link;
        link.band = i;
        link.ue = state.plan.owner[i];
        link.gain = decompose_gain(s, uav, incoming, i, link.ue);
        links.push_back(std::move(link));
    }
    {
        auto reflect = reflection_coefficients(incoming);
        for (auto &link : links)
            link.floor = link_gain(s, uav, reflect, link.band, link.ue);
    }
    if (links.empty())
        return result;

    const std::size_t L = links.size();
    std::vector<double> prices(L, s.limits.initial_price);
    std::vector<double> current(incoming.begin(), incoming.end());
    std::vector<cplx> scalars(L);
    std::vector<PricedLink> priced(L);
    std::vector<double> surplus(L);
    double tau0 = 0.0;

    for (std::size_t i = 0; i < L; ++i)
        scalars[i] = links[i].gain.array_sum;

    for (int iter = 1; iter <= s.limits.phase_max_iters; ++iter)
    {
        result.iterations = iter;
        std::vector<Minorant> minorants(L);
        for (std::size_t i = 0; i < L; ++i)
        {
            const auto &g = links[i].gain;
            minorants[i] = minorant_coefficients(scalars[i], g.G, g.F, g.Q, links[i].floor);
            priced[i] = {minorants[i].upsilon, g.v};
        }

        std::vector<double> next = closed_form_phases(prices, priced);
        for (std::size_t i = 0; i < L; ++i)
        {
            scalars[i] = effective_scalar(links[i].gain.v, next);
            surplus[i] = std::real(minorants[i].upsilon * scalars[i]) - minorants[i].chi;
        }

        double improvement = relative_improvement(s, uav, links, next);
        if (improvement > result.improvement)
        {
            result.improvement = improvement;
            result.phases = next;
            result.accepted = true;
        }

        if (iter == 1)
        {
            double largest = 0.0;
            for (double v : surplus)
                largest = std::max(largest, std::fabs(v));
            tau0 = largest > 0.0 ? 0.5 / largest : 1.0;
        }
        pricing_update(prices, surplus, pricing_step(tau0, iter));
        // The closed form only sees price ratios. Rescale so the prices do
        // not all decay to zero once every floor is met.
        double top = *std::max_element(prices.begin(), prices.end());
        for (auto &p : prices)
            p = top > 0.0 ? p * (s.limits.initial_price / top) : s.limits.initial_price;

        double change = 0.0;
        for (std::size_t n = 0; n < next.size(); ++n)
            change = std::max(change, phase_distance(next[n], current[n]));
        current = std::move(next);
        if (change <= s.tol.phase_rad)
            break;
    }
    return result;
}

int optimize_phases(WorldState &state)
{
    int accepted = 0;
    for (int t = 0; t < state.world().slot_count(); ++t)
    {
        PhaseSlotResult r = optimize_phases_slot(state, t);
        if (r.accepted)
        {
            state.phases.set_row(t, r.phases);
            ++accepted;
        }
    }
    return accepted;
}

} // namespace thzuav
