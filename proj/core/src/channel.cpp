#include "thzuav/channel.hpp"

#include <cassert>
#include <stdexcept>

namespace thzuav {

namespace {

// Phase slopes per element step along x and z for theta + vartheta.
struct ElementSlopes
{
    double x = 0.0;
    double z = 0.0;
};

ElementSlopes incidence_slopes(const Vec3 &uav, const IrsGeometry &irs, double frequency_hz)
{
    Vec3 r0 = irs.anchor() - uav;
    double k = kTwoPi * frequency_hz / (norm(r0) * kSpeedOfLight);
    return {k * r0.x * irs.spacing_x_m, k * r0.z * irs.spacing_z_m};
}

ElementSlopes departure_slopes(const Vec3 &ue_position, const IrsGeometry &irs, double frequency_hz)
{
    Vec3 ru = ue_position - irs.anchor();
    double k = kTwoPi * frequency_hz / (norm(ru) * kSpeedOfLight);
    return {k * ru.x * irs.spacing_x_m, k * ru.z * irs.spacing_z_m};
}

// exp(-j (sx*ix + sz*iz)) laid out in element order.
std::vector<cplx> separable_response(const IrsGeometry &irs, ElementSlopes s)
{
    std::vector<cplx> ex(static_cast<std::size_t>(irs.nx)), ez(static_cast<std::size_t>(irs.nz));
    for (int ix = 0; ix < irs.nx; ++ix)
        ex[ix] = std::polar(1.0, -s.x * ix);
    for (int iz = 0; iz < irs.nz; ++iz)
        ez[iz] = std::polar(1.0, -s.z * iz);
    std::vector<cplx> out(static_cast<std::size_t>(irs.element_count()));
    for (int ix = 0; ix < irs.nx; ++ix)
        for (int iz = 0; iz < irs.nz; ++iz)
            out[irs.element_index(ix, iz)] = ex[ix] * ez[iz];
    out[0] = cplx(1.0, 0.0);
    return out;
}

double amplitude_a(double f) { return kSpeedOfLight / (4.0 * kPi * f); }

double amplitude_b(double f, double r_u, double k)
{
    return kSpeedOfLight / (8.0 * std::sqrt(kPi * kPi * kPi) * f * r_u) * std::exp(-0.5 * k * r_u);
}

void check_phases(const Scenario &s, std::span<const double> phases)
{
    if (static_cast<int>(phases.size()) != s.element_count())
        throw std::invalid_argument("phase vector length must equal the IRS element count");
}

} // namespace

void PhaseSchedule::set_row(int t, std::span<const double> phases)
{
    if (static_cast<int>(phases.size()) != elements_)
        throw std::invalid_argument("phase row length mismatch");
    for (int n = 0; n < elements_; ++n)
        set(t, n, phases[n]);
}

LinkDistances distances(const Vec3 &uav, const Scenario &scenario, int ue)
{
    const Vec3 &lu = scenario.ues[ue];
    Vec3 l0 = scenario.irs.anchor();
    return {distance(uav, lu), distance(l0, uav), distance(lu, l0)};
}

double incidence_phase(const Vec3 &uav, const IrsGeometry &irs, double frequency_hz, int ix, int iz)
{
    double r = distance(irs.anchor(), uav);
    double a = irs.anchor_x_m;
    double c = irs.anchor_z_m;
    return kTwoPi * frequency_hz / (r * kSpeedOfLight) *
           ((a - uav.x) * ix * irs.spacing_x_m + (c - uav.z) * iz * irs.spacing_z_m);
}

double departure_phase(const Vec3 &ue_position, const IrsGeometry &irs, double frequency_hz, int ix, int iz)
{
    double r_u = distance(ue_position, irs.anchor());
    double a = irs.anchor_x_m;
    double c = irs.anchor_z_m;
    return kTwoPi * frequency_hz / (r_u * kSpeedOfLight) *
           ((ue_position.x - a) * ix * irs.spacing_x_m - c * iz * irs.spacing_z_m);
}

std::vector<cplx> incidence_response(const Vec3 &uav, const IrsGeometry &irs, double frequency_hz)
{
    std::vector<cplx> out(static_cast<std::size_t>(irs.element_count()));
    for (int ix = 0; ix < irs.nx; ++ix)
        for (int iz = 0; iz < irs.nz; ++iz)
            out[irs.element_index(ix, iz)] = std::polar(1.0, -incidence_phase(uav, irs, frequency_hz, ix, iz));
    return out;
}

std::vector<cplx> departure_response(const Vec3 &ue_position, const IrsGeometry &irs, double frequency_hz)
{
    std::vector<cplx> out(static_cast<std::size_t>(irs.element_count()));
    for (int ix = 0; ix < irs.nx; ++ix)
        for (int iz = 0; iz < irs.nz; ++iz)
            out[irs.element_index(ix, iz)] =
                std::polar(1.0, -departure_phase(ue_position, irs, frequency_hz, ix, iz));
    return out;
}

std::vector<cplx> effective_response(const Vec3 &uav, const Vec3 &ue_position, const IrsGeometry &irs,
                                     double frequency_hz)
{
    ElementSlopes in = incidence_slopes(uav, irs, frequency_hz);
    ElementSlopes out = departure_slopes(ue_position, irs, frequency_hz);
    return separable_response(irs, {in.x + out.x, in.z + out.z});
}

cplx direct_gain(const Scenario &scenario, const Vec3 &uav, int band, int ue)
{
    const SubBand &b = scenario.bands[band];
    double d = distance(uav, scenario.ues[ue]);
    double f = b.center_hz;
    return kSpeedOfLight / (4.0 * kPi * f * d) * std::polar(1.0, -kTwoPi * f * d / kSpeedOfLight) *
           std::exp(-0.5 * b.absorption_per_m * d);
}

cplx cascaded_amplitude(const Scenario &scenario, const Vec3 &uav, int band, int ue)
{
    const SubBand &b = scenario.bands[band];
    LinkDistances L = distances(uav, scenario, ue);
    double f = b.center_hz;
    double path = L.irs_m + L.irs_to_ue_m;
    return kSpeedOfLight / (8.0 * std::sqrt(kPi * kPi * kPi) * f * L.irs_to_ue_m * L.irs_m) *
           std::polar(1.0, -kTwoPi * f * path / kSpeedOfLight) * std::exp(-0.5 * b.absorption_per_m * path);
}

cplx cascaded_gain(const Scenario &scenario, const Vec3 &uav, std::span<const double> phases, int band, int ue)
{
    check_phases(scenario, phases);
    double f = scenario.bands[band].center_hz;
    auto er = incidence_response(uav, scenario.irs, f);
    auto eu = departure_response(scenario.ues[ue], scenario.irs, f);
    cplx sum;
    for (std::size_t n = 0; n < er.size(); ++n)
        sum += er[n] * std::polar(1.0, phases[n]) * eu[n];
    return cascaded_amplitude(scenario, uav, band, ue) * sum;
}

double combined_gain_power(const Scenario &scenario, const Vec3 &uav, std::span<const double> phases, int band,
                           int ue)
{
    return std::norm(direct_gain(scenario, uav, band, ue) + cascaded_gain(scenario, uav, phases, band, ue));
}

GainDecomposition decompose_gain(const Scenario &scenario, const Vec3 &uav, std::span<const double> phases,
                                 int band, int ue)
{
    check_phases(scenario, phases);
    const SubBand &b = scenario.bands[band];
    LinkDistances L = distances(uav, scenario, ue);
    double f = b.center_hz;

    GainDecomposition g;
    g.ue_distance = L.ue_m;
    g.irs_distance = L.irs_m;
    g.irs_to_ue = L.irs_to_ue_m;
    g.A = amplitude_a(f);
    g.B = amplitude_b(f, L.irs_to_ue_m, b.absorption_per_m);
    g.K = b.absorption_per_m;

    g.v = effective_response(uav, scenario.ues[ue], scenario.irs, f);
    for (std::size_t n = 0; n < g.v.size(); ++n)
        g.array_sum += g.v[n] * std::polar(1.0, phases[n]);
    g.C = std::norm(g.array_sum);

    cplx excess = std::polar(1.0, -kTwoPi * f * (L.irs_m + L.irs_to_ue_m - L.ue_m) / kSpeedOfLight);
    g.D = g.A * g.B * std::real(excess * g.array_sum);

    double d = L.ue_m, r = L.irs_m, K = b.absorption_per_m;
    g.G = g.A * g.A / (d * d) * std::exp(-K * d);
    g.F = g.B * g.B / (r * r) * std::exp(-K * r);
    g.Q = 2.0 * g.A * g.B / (d * r) * std::exp(-0.5 * K * (r + d)) * excess;
    return g;
}

double GainDecomposition::trajectory_form() const
{
    double d = ue_distance, r = irs_distance;
    return A * A / (d * d) * std::exp(-K * d) + B * B / (r * r) * std::exp(-K * r) * C +
           2.0 * D / (d * r) * std::exp(-0.5 * K * (r + d));
}

double GainDecomposition::phase_form(std::span<const double> phases) const
{
    assert(phases.size() == v.size());
    cplx s;
    for (std::size_t n = 0; n < v.size(); ++n)
        s += v[n] * std::polar(1.0, phases[n]);
    return G + F * std::norm(s) + std::real(Q * s);
}

double link_rate(double power_w, double gain, const SubBand &band)
{
    double snr = power_w * gain / (band.noise_psd_w_per_hz * band.bandwidth_hz);
    return band.bandwidth_hz * std::log2(1.0 + snr);
}

std::vector<cplx> reflection_coefficients(std::span<const double> phases)
{
    std::vector<cplx> out(phases.size());
    for (std::size_t n = 0; n < phases.size(); ++n)
        out[n] = std::polar(1.0, phases[n]);
    return out;
}

double link_gain(const Scenario &scenario, const Vec3 &uav, std::span<const cplx> reflection, int band, int ue)
{
    // Factorized array sum: sum_ix ex[ix] sum_iz ez[iz] reflection[n].
    const IrsGeometry &irs = scenario.irs;
    const double f = scenario.bands[band].center_hz;
    ElementSlopes in = incidence_slopes(uav, irs, f);
    ElementSlopes out = departure_slopes(scenario.ues[ue], irs, f);
    const double sx = in.x + out.x, sz = in.z + out.z;

    thread_local std::vector<cplx> ez;
    ez.resize(static_cast<std::size_t>(irs.nz));
    for (int iz = 0; iz < irs.nz; ++iz)
        ez[iz] = std::polar(1.0, -sz * iz);

    cplx s;
    for (int ix = 0; ix < irs.nx; ++ix)
    {
        const cplx *row = reflection.data() + irs.element_index(ix, 0);
        cplx column;
        for (int iz = 0; iz < irs.nz; ++iz)
            column += ez[iz] * row[iz];
        s += std::polar(1.0, -sx * ix) * column;
    }
    cplx h = direct_gain(scenario, uav, band, ue);
    cplx g = cascaded_amplitude(scenario, uav, band, ue) * s;
    return std::norm(h + g);
}

GainTable gain_table(const Scenario &scenario, std::span<const Vec3> trajectory, const PhaseSchedule &phases)
{
    int T = static_cast<int>(trajectory.size());
    GainTable table(T, scenario.band_count(), scenario.ue_count());
    for (int t = 0; t < T; ++t)
    {
        auto reflect = reflection_coefficients(phases.row(t));
        for (int i = 0; i < scenario.band_count(); ++i)
            for (int u = 0; u < scenario.ue_count(); ++u)
                table.at(t, i, u) = link_gain(scenario, trajectory[t], reflect, i, u);
    }
    return table;
}

} // namespace thzuav
