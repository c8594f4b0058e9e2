#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "thzuav/engine.hpp"
#include "thzuav/phase_opt.hpp"

using namespace thzuav;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

cplx random_unit(Rng &rng) { return std::polar(1.0, rng.uniform(0.0, kTwoPi)); }

// Sum_i rho_i Re{upsilon_i sum_n v_{i,n} e^{j phi_n}}
double penalty(std::span<const double> rho, std::span<const PricedLink> links, std::span<const double> phases)
{
    double total = 0.0;
    for (std::size_t i = 0; i < links.size(); ++i)
    {
        cplx s;
        for (std::size_t n = 0; n < phases.size(); ++n)
            s += links[i].v[n] * std::exp(cplx(0.0, phases[n]));
        total += rho[i] * std::real(links[i].upsilon * s);
    }
    return total;
}

// World with one powered band per slot and a chosen IRS size.
WorldState single_band_world(int nx, int nz, std::uint64_t seed)
{
    Scenario s = testing::toy_scenario(1, 1, 2, nx, nz);
    WorldState w = initialize(testing::share(s), seed);
    w.trajectory = {{3.0, 4.0, 10.0}, {-2.0, 6.0, 10.0}};
    return w;
}

} // namespace

TEST_CASE("effective scalar")
{
    std::vector<cplx> one{1.0};
    CHECK(effective_scalar(one, std::vector<double>{0.0}) == cplx(1.0, 0.0));

    Rng rng(1);
    std::vector<cplx> v(5);
    std::vector<double> phases(5), aligned(5);
    for (int n = 0; n < 5; ++n)
    {
        v[n] = random_unit(rng);
        phases[n] = rng.uniform(0, kTwoPi);
        aligned[n] = -std::arg(v[n]);
    }
    CHECK_THAT(std::real(effective_scalar(v, aligned)), WithinRel(5.0, 1e-14));
    CHECK_THAT(std::imag(effective_scalar(v, aligned)), WithinAbs(0.0, 1e-14));

    cplx ref;
    for (int n = 0; n < 5; ++n)
        ref += v[n] * cplx(std::cos(phases[n]), std::sin(phases[n]));
    CHECK(std::abs(effective_scalar(v, phases) - ref) < 1e-14);
    CHECK_THROWS_AS(effective_scalar(v, std::vector<double>(4)), std::invalid_argument);
}

TEST_CASE("surrogate value")
{
    CHECK(surrogate_value(0.0, 3.0, 2.0, cplx(1.0, 1.0)) == 3.0);
    CHECK_THAT(surrogate_value(std::polar(1.0, 0.7), 3.0, 2.0, 0.0), WithinRel(5.0, 1e-15));
}

TEST_CASE("minorant is tangent and under-estimates")
{
    Rng rng(2);
    const double G = 0.3, F = 1.7, floor = 0.9;
    const cplx Q(0.4, -1.1);
    cplx s_t(0.6, 0.2);
    Minorant m = minorant_coefficients(s_t, G, F, Q, floor);
    CHECK(std::abs(m.upsilon - (2.0 * F * std::conj(s_t) + Q)) < 1e-15);
    CHECK_THAT(minorant_value(m, s_t, floor), WithinRel(surrogate_value(s_t, G, F, Q), 1e-14));

    Minorant affine = minorant_coefficients(s_t, G, 0.0, Q, floor);
    for (int k = 0; k < 20; ++k)
    {
        cplx s(rng.uniform(-3, 3), rng.uniform(-3, 3));
        CHECK_THAT(minorant_value(affine, s, floor), WithinAbs(surrogate_value(s, G, 0.0, Q), 1e-13));
    }

    for (int k = 0; k < 1000; ++k)
    {
        double Fk = rng.uniform(0, 5), Gk = rng.uniform(0, 5);
        cplx Qk(rng.uniform(-5, 5), rng.uniform(-5, 5));
        cplx a(rng.uniform(-10, 10), rng.uniform(-10, 10)), b(rng.uniform(-10, 10), rng.uniform(-10, 10));
        Minorant mk = minorant_coefficients(b, Gk, Fk, Qk, 0.0);
        CHECK(surrogate_value(a, Gk, Fk, Qk) - minorant_value(mk, a, 0.0) >= -1e-12 * (1 + std::norm(a) * Fk));
    }
}

TEST_CASE("closed form aligns a single term")
{
    std::vector<cplx> v{std::polar(1.0, kPi / 3)};
    std::vector<PricedLink> links{{1.0, v}};
    std::vector<double> rho{1.0};
    auto phi = closed_form_phases(rho, links);
    CHECK_THAT(phi[0], WithinAbs(5.0 * kPi / 3.0, 1e-12));
    CHECK_THAT(std::real(v[0] * std::exp(cplx(0, phi[0]))), WithinAbs(1.0, 1e-12));

    std::vector<cplx> real_xi{cplx(1.0, 0.0)};
    std::vector<PricedLink> real_links{{cplx(2.0, 0.0), real_xi}};
    CHECK(closed_form_phases(rho, real_links)[0] == 0.0);

    std::vector<double> zero{0.0};
    CHECK(closed_form_phases(zero, links)[0] == 0.0);
}

TEST_CASE("closed form matches an exhaustive grid")
{
    Rng rng(3);
    const int grid = 64;
    for (int trial = 0; trial < 5; ++trial)
    {
        const int N = 3;
        std::vector<std::vector<cplx>> v(2, std::vector<cplx>(N));
        for (auto &row : v)
            for (auto &e : row)
                e = random_unit(rng);
        std::vector<PricedLink> links{{cplx(rng.uniform(-2, 2), rng.uniform(-2, 2)), v[0]},
                                      {cplx(rng.uniform(-2, 2), rng.uniform(-2, 2)), v[1]}};
        std::vector<double> rho{rng.uniform(0.1, 2), rng.uniform(0.1, 2)};

        auto phi = closed_form_phases(rho, links);
        double closed = penalty(rho, links, phi);

        double best = -1e300;
        std::vector<double> p(N);
        for (int a = 0; a < grid; ++a)
            for (int b = 0; b < grid; ++b)
                for (int c = 0; c < grid; ++c)
                {
                    p = {kTwoPi * a / grid, kTwoPi * b / grid, kTwoPi * c / grid};
                    best = std::max(best, penalty(rho, links, p));
                }

        double xi_total = 0.0;
        for (int n = 0; n < N; ++n)
        {
            cplx xi;
            for (int i = 0; i < 2; ++i)
                xi += rho[i] * links[i].upsilon * links[i].v[n];
            xi_total += std::abs(xi);
        }
        CHECK(closed >= best - 1e-12);
        CHECK(closed - best <= xi_total * (1.0 - std::cos(kPi / grid)) + 1e-12);
        CHECK_THAT(closed, WithinRel(xi_total, 1e-12));

        for (int n = 0; n < N; ++n)
            for (double dphi : {1e-3, -1e-3})
            {
                auto q = phi;
                q[n] += dphi;
                CHECK(penalty(rho, links, q) <= closed + 1e-12);
            }
        for (double x : phi)
        {
            CHECK(x >= 0.0);
            CHECK(x < kTwoPi);
        }
    }
}

TEST_CASE("pricing update")
{
    std::vector<double> rho{0.5};
    pricing_update(rho, std::vector<double>{-2.0}, 0.1);
    CHECK_THAT(rho[0], WithinAbs(0.7, 1e-15));
    pricing_update(rho, std::vector<double>{1e6}, 0.1);
    CHECK(rho[0] == 0.0);
    rho = {0.3};
    pricing_update(rho, std::vector<double>{0.0}, 0.1);
    CHECK(rho[0] == 0.3);
    CHECK_THAT(pricing_step(2.0, 4), WithinRel(1.0, 1e-15));
    CHECK_THROWS_AS(pricing_update(rho, std::vector<double>{}, 0.1), std::invalid_argument);
}

TEST_CASE("single element phase aligns cascaded with direct path")
{
    for (std::uint64_t seed : {1u, 2u, 3u})
    {
        WorldState w = single_band_world(1, 1, seed);
        const Scenario &s = w.world();
        for (int t = 0; t < 2; ++t)
        {
            auto result = optimize_phases_slot(w, t);
            REQUIRE(result.phases.size() == 1u);
            double got = combined_gain_power(s, w.trajectory[t], result.phases, 0, 0);
            double best = 0.0;
            for (int k = 0; k < 360; ++k)
                best = std::max(best, combined_gain_power(s, w.trajectory[t], std::vector<double>{kTwoPi * k / 360}, 0, 0));
            CHECK(got >= best * (1 - 1e-6));
            CHECK(result.phases[0] >= 0.0);
            CHECK(result.phases[0] < kTwoPi);
        }
    }
}

TEST_CASE("already optimal phases are kept")
{
    WorldState w = single_band_world(1, 1, 4);
    optimize_phases(w);
    auto before = std::vector<double>(w.phases.row(0).begin(), w.phases.row(0).end());
    auto again = optimize_phases_slot(w, 0);
    CHECK(phase_distance(again.phases[0], before[0]) <= w.world().tol.phase_rad);
}

TEST_CASE("phase step never lowers any powered link gain")
{
    Scenario s = testing::toy_scenario(4, 2, 3, 3, 3);
    WorldState w = initialize(testing::share(s), 9);
    w.trajectory = {w.trajectory[0], {2.0, -3.0, 10.0}, w.trajectory[2]};
    // Band 3 idle in slot 1 so it must not constrain the result.
    w.plan.power_at(1, 3) = 0.0;
    for (int t = 0; t < 3; ++t)
    {
        auto result = optimize_phases_slot(w, t);
        for (int i = 0; i < 4; ++i)
        {
            if (w.plan.power_at(t, i) <= 0.0)
                continue;
            int u = w.plan.owner[i];
            double before = combined_gain_power(s, w.trajectory[t], w.phases.row(t), i, u);
            double after = combined_gain_power(s, w.trajectory[t], result.phases, i, u);
            CHECK(after >= before * (1 - 1e-9));
        }
    }
}

TEST_CASE("conflicting bands: result dominates or ties the incoming gains")
{
    // Two UEs on opposite sides want different element alignments.
    Scenario s = testing::toy_scenario(2, 2, 2, 2, 2);
    s.ues = {{-15.0, 2.0, 0.0}, {15.0, 2.0, 0.0}};
    WorldState w = initialize(testing::share(s), 5);
    w.plan.owner = {0, 1};
    auto result = optimize_phases_slot(w, 1);
    double min_rel = 1e300;
    for (int i = 0; i < 2; ++i)
    {
        double before = combined_gain_power(s, w.trajectory[1], w.phases.row(1), i, i);
        double after = combined_gain_power(s, w.trajectory[1], result.phases, i, i);
        min_rel = std::min(min_rel, (after - before) / before);
    }
    CHECK(min_rel >= -1e-9);
    if (result.accepted)
        CHECK(min_rel > 0.0);
    else
        CHECK(std::equal(result.phases.begin(), result.phases.end(), w.phases.row(1).begin()));
}

TEST_CASE("phase step keeps the exact min rate")
{
    auto s = testing::share(default_scenario());
    WorldState w = initialize(s, 3);
    double before = exact_min_avg_rate(w);
    auto rates_before = average_rates(w);
    optimize_phases(w);
    auto rates_after = average_rates(w);
    CHECK(exact_min_avg_rate(w) >= before);
    for (std::size_t u = 0; u < rates_after.size(); ++u)
        CHECK(rates_after[u] >= rates_before[u]);
    for (int t = 0; t < s->slot_count(); ++t)
        for (double x : w.phases.row(t))
        {
            CHECK(x >= 0.0);
            CHECK(x < kTwoPi);
        }
}
