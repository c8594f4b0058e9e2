#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "thzuav/channel.hpp"
#include "thzuav/engine.hpp"
#include "thzuav/rng.hpp"
#include "thzuav/scenario.hpp"

namespace testing {

using thzuav::cplx;
using thzuav::Scenario;
using thzuav::Vec3;

// Small valid world: `bands` bands from 300 GHz in 10 GHz steps, UEs spread
// on a line under the IRS, short horizon.
inline Scenario toy_scenario(int bands, int ues, int slots, int nx = 2, int nz = 2)
{
    Scenario s;
    for (int i = 0; i < bands; ++i)
        s.bands.push_back({i, 300e9 + 10e9 * i, 10e9, 0.01 + 0.002 * i, thzuav::thermal_noise_psd()});
    for (int u = 0; u < ues; ++u)
        s.ues.push_back({-6.0 + 5.0 * u, 3.0 + 1.5 * u, 0.0});
    s.irs.nx = nx;
    s.irs.nz = nz;
    s.uav.slots = slots;
    s.uav.start_x_m = 4.0;
    s.uav.start_y_m = 2.0;
    thzuav::validate(s);
    return s;
}

inline std::shared_ptr<const Scenario> share(Scenario s) { return std::make_shared<const Scenario>(std::move(s)); }

// Per-element reference for the cascaded gain: every phase term spelled out.
inline cplx cascaded_reference(const Scenario &s, const Vec3 &l, const std::vector<double> &phases, int band, int ue)
{
    const double f = s.bands[band].center_hz, K = s.bands[band].absorption_per_m, c = thzuav::kSpeedOfLight;
    const Vec3 l0 = s.irs.anchor(), lu = s.ues[ue];
    const double r = std::sqrt((l0.x - l.x) * (l0.x - l.x) + (l0.y - l.y) * (l0.y - l.y) + (l0.z - l.z) * (l0.z - l.z));
    const double ru = std::sqrt((lu.x - l0.x) * (lu.x - l0.x) + lu.y * lu.y + l0.z * l0.z);
    const double a = s.irs.anchor_x_m, cz = s.irs.anchor_z_m;
    cplx sum = 0.0;
    for (int ix = 0; ix < s.irs.nx; ++ix)
        for (int iz = 0; iz < s.irs.nz; ++iz)
        {
            double theta = 2 * M_PI * f / (r * c) * ((a - l.x) * ix * s.irs.spacing_x_m + (cz - l.z) * iz * s.irs.spacing_z_m);
            double vartheta = 2 * M_PI * f / (ru * c) * ((lu.x - a) * ix * s.irs.spacing_x_m - cz * iz * s.irs.spacing_z_m);
            int n = iz + ix * s.irs.nz;
            sum += std::exp(cplx(0, -theta)) * std::exp(cplx(0, phases[n])) * std::exp(cplx(0, -vartheta));
        }
    cplx g_tilde = c / (8.0 * std::sqrt(M_PI * M_PI * M_PI) * f * ru * r) * std::exp(cplx(0, -2 * M_PI * f * (r + ru) / c)) *
                   std::exp(-K * (r + ru) / 2);
    return g_tilde * sum;
}

inline cplx direct_reference(const Scenario &s, const Vec3 &l, int band, int ue)
{
    const double f = s.bands[band].center_hz, K = s.bands[band].absorption_per_m, c = thzuav::kSpeedOfLight;
    const Vec3 lu = s.ues[ue];
    double d = std::sqrt((l.x - lu.x) * (l.x - lu.x) + (l.y - lu.y) * (l.y - lu.y) + l.z * l.z);
    return c / (4 * M_PI * f * d) * std::exp(cplx(0, -2 * M_PI * f * d / c)) * std::exp(-K * d / 2);
}

inline double rate_reference(double p, double gain, const thzuav::SubBand &b)
{
    return b.bandwidth_hz * std::log2(1.0 + p * gain / (b.noise_psd_w_per_hz * b.bandwidth_hz));
}

// Slot-by-slot, band-by-band sum over the stored state, written out longhand.
inline std::vector<double> average_rates_reference(const thzuav::WorldState &w)
{
    const Scenario &s = w.world();
    std::vector<double> rates(s.ues.size(), 0.0);
    for (int t = 0; t < s.slot_count(); ++t)
    {
        std::vector<double> phases(w.phases.row(t).begin(), w.phases.row(t).end());
        for (int i = 0; i < s.band_count(); ++i)
        {
            int u = w.plan.owner[i];
            cplx total = direct_reference(s, w.trajectory[t], i, u) + cascaded_reference(s, w.trajectory[t], phases, i, u);
            rates[u] += rate_reference(w.plan.power_at(t, i), std::norm(total), s.bands[i]);
        }
    }
    for (auto &r : rates)
        r /= s.slot_count();
    return rates;
}

inline double rel_diff(double a, double b)
{
    double scale = std::max(std::fabs(a), std::fabs(b));
    return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

} // namespace testing

#include "thzuav/surrogate.hpp"

namespace testing {

// Step for central differences: 1e-5 of the local length scale of the
// kernel, min(x, 1/K).
inline double fd_step(double x, double K) { return 1e-5 * x / std::max(1.0, K * x); }

/// Worst relative error of the analytic f', f'' against central differences.
/// Everything is compared after dividing out exp(-K x), which underflows
/// for large K x while the ratio stays representable.
inline double f_kernel_fd_error(double x, double K)
{
    const double h = fd_step(x, K);
    auto scaled_value = [&](double xp) { return std::exp(-K * (xp - x)) / (xp * xp); };
    auto scaled_first = [&](double xp) {
        auto k = thzuav::f_kernel(xp, K);
        return std::exp(k.exponent + K * x) * k.first_shape;
    };
    auto k = thzuav::f_kernel(x, K);
    double d1 = (scaled_value(x + h) - scaled_value(x - h)) / (2 * h);
    double d2 = (scaled_first(x + h) - scaled_first(x - h)) / (2 * h);
    return std::max(rel_diff(d1, k.first_shape), rel_diff(d2, k.second_shape));
}

inline double q_kernel_fd_error(double x, double y, double K)
{
    const double hx = fd_step(x, 0.5 * K), hy = fd_step(y, 0.5 * K);
    const double E = -0.5 * K * (x + y);
    auto scaled_value = [&](double xp, double yp) { return std::exp(-0.5 * K * (xp + yp) - E) / (xp * yp); };
    auto scaled = [&](double xp, double yp, double thzuav::QKernel::*field) {
        auto q = thzuav::q_kernel(xp, yp, K);
        return std::exp(q.exponent - E) * (q.*field);
    };
    auto q = thzuav::q_kernel(x, y, K);
    using QK = thzuav::QKernel;
    double dx = (scaled_value(x + hx, y) - scaled_value(x - hx, y)) / (2 * hx);
    double dy = (scaled_value(x, y + hy) - scaled_value(x, y - hy)) / (2 * hy);
    double hxx = (scaled(x + hx, y, &QK::dx_shape) - scaled(x - hx, y, &QK::dx_shape)) / (2 * hx);
    double hxy = (scaled(x, y + hy, &QK::dx_shape) - scaled(x, y - hy, &QK::dx_shape)) / (2 * hy);
    double hyx = (scaled(x + hx, y, &QK::dy_shape) - scaled(x - hx, y, &QK::dy_shape)) / (2 * hx);
    double hyy = (scaled(x, y + hy, &QK::dy_shape) - scaled(x, y - hy, &QK::dy_shape)) / (2 * hy);
    return std::max({rel_diff(dx, q.dx_shape), rel_diff(dy, q.dy_shape), rel_diff(hxx, q.hxx_shape),
                     rel_diff(hxy, q.hxy_shape), rel_diff(hyx, q.hxy_shape), rel_diff(hyy, q.hyy_shape)});
}

// Positive definiteness of the scaled Hessian (the exp factor is positive).
inline bool q_hessian_positive_definite(const thzuav::QKernel &q)
{
    return q.hxx_shape > 0.0 && q.hxx_shape * q.hyy_shape - q.hxy_shape * q.hxy_shape > 0.0;
}

} // namespace testing
