#include "thzuav/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>

namespace thzuav {

std::vector<double> project_to_simplex(std::span<const double> point)
{
    if (point.empty())
        return {};
    std::vector<double> sorted(point.begin(), point.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0, shift = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k)
    {
        cumulative += sorted[k];
        double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (sorted[k] - candidate > 0.0)
            shift = candidate;
    }
    std::vector<double> out(point.size());
    for (std::size_t k = 0; k < point.size(); ++k)
        out[k] = std::max(0.0, point[k] - shift);
    return out;
}

std::vector<double> waterfill_slot(std::span<const SubBand> bands, std::span<const double> band_gains,
                                   std::span<const double> band_weights, double max_power_w)
{
    const std::size_t I = bands.size();
    if (band_gains.size() != I || band_weights.size() != I)
        throw std::invalid_argument("waterfill_slot: band, gain and weight lengths differ");

    // p_i(mu) = max(0, slope_i * mu - floor_i), mu = 1/lambda is the water level.
    std::vector<double> slope(I, 0.0), floor(I, 0.0);
    std::vector<bool> usable(I, false);
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < I; ++i)
    {
        double gamma = band_gains[i] / (bands[i].noise_psd_w_per_hz * bands[i].bandwidth_hz);
        if (!(gamma > 0.0) || !(band_weights[i] > 0.0))
            continue;
        usable[i] = true;
        slope[i] = band_weights[i] * bands[i].bandwidth_hz / std::numbers::ln2;
        floor[i] = 1.0 / gamma;
        hi = std::min(hi, (floor[i] + max_power_w) / slope[i]);
    }
    std::vector<double> power(I, 0.0);
    if (!std::isfinite(hi))
        return power;

    // Closed-form level on the active set at mu; valid when it reproduces
    // that active set.
    auto exact_level = [&](double mu, double &level) {
        double slope_sum = 0.0, floor_sum = 0.0;
        for (std::size_t i = 0; i < I; ++i)
            if (usable[i] && slope[i] * mu > floor[i])
            {
                slope_sum += slope[i];
                floor_sum += floor[i];
            }
        if (!(slope_sum > 0.0))
            return false;
        level = (max_power_w + floor_sum) / slope_sum;
        for (std::size_t i = 0; i < I; ++i)
            if (usable[i] && (slope[i] * mu > floor[i]) != (slope[i] * level > floor[i]))
                return false;
        return true;
    };
    auto total = [&](double mu) {
        double sum = 0.0;
        for (std::size_t i = 0; i < I; ++i)
            if (usable[i])
                sum += std::max(0.0, slope[i] * mu - floor[i]);
        return sum;
    };

    double lo = 0.0, mu = hi;
    for (int it = 0; it < 100; ++it)
    {
        mu = 0.5 * (lo + hi);
        double level;
        if (exact_level(mu, level))
        {
            mu = level;
            break;
        }
        double s = total(mu);
        if (std::fabs(s - max_power_w) < 1e-12 * max_power_w)
            break;
        (s < max_power_w ? lo : hi) = mu;
    }

    double sum = 0.0;
    for (std::size_t i = 0; i < I; ++i)
    {
        power[i] = usable[i] ? std::max(0.0, slope[i] * mu - floor[i]) : 0.0;
        sum += power[i];
    }
    if (sum > max_power_w)
        for (auto &p : power)
            p *= max_power_w / sum;
    return power;
}

std::vector<int> assign_bands(const Scenario &scenario, const GainTable &gains, std::span<const double> weights)
{
    const int I = scenario.band_count(), U = scenario.ue_count();
    if (static_cast<int>(weights.size()) != U)
        throw std::invalid_argument("assign_bands: one weight per UE required");
    double share = scenario.uav.max_power_w / I;
    std::vector<int> owner(static_cast<std::size_t>(I), 0);
    for (int i = 0; i < I; ++i)
    {
        const SubBand &b = scenario.bands[i];
        double best = -1.0;
        for (int u = 0; u < U; ++u)
        {
            double score = 0.0;
            for (int t = 0; t < gains.slots(); ++t)
                score += link_rate(share, gains(t, i, u), b);
            score *= weights[u];
            if (score > best)
            {
                best = score;
                owner[i] = u;
            }
        }
    }
    return owner;
}

AllocationPlan waterfill_plan(const Scenario &scenario, const GainTable &gains, std::vector<int> owner,
                              std::span<const double> weights)
{
    const int I = scenario.band_count();
    AllocationPlan plan(gains.slots(), I);
    plan.owner = std::move(owner);
    std::vector<double> band_gain(static_cast<std::size_t>(I)), band_weight(static_cast<std::size_t>(I));
    for (int i = 0; i < I; ++i)
        band_weight[i] = weights[plan.owner[i]];
    for (int t = 0; t < gains.slots(); ++t)
    {
        for (int i = 0; i < I; ++i)
            band_gain[i] = gains(t, i, plan.owner[i]);
        auto p = waterfill_slot(scenario.bands, band_gain, band_weight, scenario.uav.max_power_w);
        std::copy(p.begin(), p.end(), plan.slot_powers(t).begin());
    }
    return plan;
}

namespace {

struct Candidate
{
    AllocationPlan plan;
    std::vector<double> rates;
    double r = 0.0;
    std::vector<double> weights;
};

Candidate evaluate(const Scenario &scenario, const GainTable &gains, const std::vector<int> &owner,
                   const std::vector<double> &weights)
{
    Candidate c;
    c.plan = waterfill_plan(scenario, gains, owner, weights);
    c.rates = average_rates(scenario, c.plan, gains);
    c.r = *std::min_element(c.rates.begin(), c.rates.end());
    c.weights = weights;
    return c;
}

/// For a fixed assignment the max-min powers equalize the UE rates and are
/// the water-filling solution for some weight vector. Raising w_p against
/// w_q moves rate from q to p, so R_p - R_q is monotone in log(w_p/w_q):
/// each step bisects that ratio for the poorest and richest UE.
Candidate balance(const Scenario &scenario, const GainTable &gains, const std::vector<int> &owner,
                  std::vector<double> weights, int max_steps, double tol)
{
    const int U = scenario.ue_count();
    for (auto &w : weights)
        w = std::max(w, 1e-6);
    double norm = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (auto &w : weights)
        w /= norm;

    Candidate best = evaluate(scenario, gains, owner, weights);
    std::vector<bool> owns(static_cast<std::size_t>(U), false);
    for (int u : owner)
        owns[u] = true;
    if (U < 2 || std::count(owns.begin(), owns.end(), false) > 0)
        return best;

    Candidate current = best;
    for (int step = 0; step < max_steps; ++step)
    {
        const auto &r = current.rates;
        int p = static_cast<int>(std::min_element(r.begin(), r.end()) - r.begin());
        int q = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
        if (r[q] - r[p] <= tol * r[q])
            break;

        auto shifted = [&](double delta) {
            std::vector<double> w = current.weights;
            w[p] *= std::exp(0.5 * delta);
            w[q] *= std::exp(-0.5 * delta);
            double sum = std::accumulate(w.begin(), w.end(), 0.0);
            for (auto &x : w)
                x /= sum;
            return evaluate(scenario, gains, owner, w);
        };
        auto pair_min = [&](const Candidate &c) { return std::min(c.rates[p], c.rates[q]); };

        Candidate pick = current;
        double lo = 0.0, hi = 80.0;
        for (int it = 0; it < 60; ++it)
        {
            double mid = 0.5 * (lo + hi);
            Candidate c = shifted(mid);
            double gap = c.rates[p] - c.rates[q];
            if (pair_min(c) > pair_min(pick))
                pick = c;
            (gap < 0.0 ? lo : hi) = mid;
            if (std::fabs(gap) <= tol * std::max(c.rates[p], c.rates[q]))
                break;
        }
        if (pick.weights == current.weights)
            break;
        current = std::move(pick);
        if (current.r > best.r)
            best = current;
    }
    return best;
}

// Bands in decreasing order of their best score, each to the UE with the
// lowest running total.
std::vector<int> greedy_assignment(const Scenario &scenario, const GainTable &gains)
{
    const int I = scenario.band_count(), U = scenario.ue_count();
    const double share = scenario.uav.max_power_w / I;
    std::vector<std::vector<double>> score(static_cast<std::size_t>(I), std::vector<double>(U, 0.0));
    std::vector<double> top(static_cast<std::size_t>(I), 0.0);
    for (int i = 0; i < I; ++i)
        for (int u = 0; u < U; ++u)
        {
            for (int t = 0; t < gains.slots(); ++t)
                score[i][u] += link_rate(share, gains(t, i, u), scenario.bands[i]);
            top[i] = std::max(top[i], score[i][u]);
        }
    std::vector<int> order(static_cast<std::size_t>(I));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return top[a] > top[b]; });

    std::vector<int> owner(static_cast<std::size_t>(I), 0);
    std::vector<double> total(static_cast<std::size_t>(U), 0.0);
    for (int i : order)
    {
        int pick = 0;
        for (int u = 1; u < U; ++u)
            if (total[u] < total[pick] || (total[u] == total[pick] && score[i][u] > score[i][pick]))
                pick = u;
        owner[i] = pick;
        total[pick] += score[i][pick];
    }
    return owner;
}

void adopt(AllocationResult &result, Candidate &&c)
{
    result.plan = std::move(c.plan);
    result.ue_rates = std::move(c.rates);
    result.r_th = c.r;
    result.weights = std::move(c.weights);
    result.improved = true;
}

} // namespace

AllocationResult solve_allocation(const Scenario &scenario, const GainTable &gains, const AllocationPlan &incoming)
{
    const int I = scenario.band_count(), U = scenario.ue_count();
    AllocationResult result;
    result.plan = incoming;
    result.ue_rates = average_rates(scenario, incoming, gains);
    result.r_th = *std::min_element(result.ue_rates.begin(), result.ue_rates.end());

    std::vector<double> w(static_cast<std::size_t>(U), 1.0 / U);
    result.weights = w;
    std::set<std::vector<int>> proposals;

    // Dual subgradient on the weights; it mostly serves to propose assignments.
    int stall = 0;
    for (int k = 1; k <= scenario.limits.alloc_max_iters; ++k)
    {
        result.iterations = k;
        auto owner = assign_bands(scenario, gains, w);
        Candidate c = evaluate(scenario, gains, owner, w);
        proposals.insert(std::move(owner));
        double previous = result.r_th;
        if (c.r > result.r_th)
            adopt(result, Candidate(c));
        stall = result.r_th - previous >= 1e-6 * result.r_th && result.r_th > previous ? 0 : stall + 1;
        if (stall >= scenario.limits.alloc_patience)
            break;

        double mean = std::accumulate(c.rates.begin(), c.rates.end(), 0.0) / U;
        if (!(mean > 0.0))
            break;
        double eta = 0.5 / k;
        for (int u = 0; u < U; ++u)
            w[u] += eta * (c.r - c.rates[u]) / mean;
        w = project_to_simplex(w);
    }

    // Full balancing for the most promising distinct assignments.
    std::vector<std::pair<double, std::vector<int>>> ranked;
    for (const auto &owner : proposals)
        ranked.emplace_back(evaluate(scenario, gains, owner, result.weights).r, owner);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) { return a.first > b.first; });
    if (ranked.size() > 4)
        ranked.resize(4);
    ranked.emplace_back(0.0, greedy_assignment(scenario, gains));
    if (static_cast<int>(incoming.owner.size()) == I)
        ranked.emplace_back(0.0, incoming.owner);
    for (const auto &entry : ranked)
    {
        Candidate c = balance(scenario, gains, entry.second, result.weights, 4 * U, 1e-9);
        if (c.r > result.r_th)
            adopt(result, std::move(c));
    }

    // Single-band moves and swaps towards the poorest UE while they raise the min rate.
    for (int pass = 0; pass < 2 * I && U > 1; ++pass)
    {
        int poorest = static_cast<int>(std::min_element(result.ue_rates.begin(), result.ue_rates.end()) -
                                       result.ue_rates.begin());
        double best_r = result.r_th;
        std::vector<int> best_owner;
        auto consider = [&](std::vector<int> owner) {
            Candidate c = balance(scenario, gains, owner, result.weights, 2, 1e-3);
            if (c.r > best_r)
            {
                best_r = c.r;
                best_owner = std::move(owner);
            }
        };
        const auto &current = result.plan.owner;
        for (int i = 0; i < I; ++i)
        {
            if (current[i] == poorest)
                continue;
            std::vector<int> moved = current;
            moved[i] = poorest;
            consider(moved);
            // Swaps with the poorest UE's bands keep every UE served.
            for (int j = 0; j < I; ++j)
                if (current[j] == poorest)
                {
                    std::vector<int> swapped = current;
                    std::swap(swapped[i], swapped[j]);
                    consider(swapped);
                }
        }
        if (best_owner.empty())
            break;
        Candidate c = balance(scenario, gains, best_owner, result.weights, 4 * U, 1e-9);
        if (!(c.r > result.r_th))
            break;
        adopt(result, std::move(c));
    }
    return result;
}

AllocationResult solve_allocation(const WorldState &state)
{
    return solve_allocation(state.world(), gain_table(state.world(), state.trajectory, state.phases), state.plan);
}

} // namespace thzuav
