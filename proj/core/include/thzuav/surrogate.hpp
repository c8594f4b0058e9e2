#pragma once

#include <span>

#include "thzuav/channel.hpp"

namespace thzuav {

/// f(x) = exp(-K x) / x^2 with its first two derivatives. Each quantity is
/// stored as exp(exponent) * shape so that callers can reason about sign and
/// curvature where the exponential underflows.
struct FKernel
{
    double exponent = 0.0;     // -K x
    double value_shape = 0.0;  // 1/x^2
    double first_shape = 0.0;  // -(Kx + 2)/x^3
    double second_shape = 0.0; // ((Kx + 2)^2 + 2)/x^4

    double value() const { return std::exp(exponent) * value_shape; }
    double first() const { return std::exp(exponent) * first_shape; }
    double second() const { return std::exp(exponent) * second_shape; }
};

/// q(x, y) = exp(-(K/2)(x + y)) / (x y) with gradient and Hessian, split the
/// same way as FKernel.
struct QKernel
{
    double exponent = 0.0; // -(K/2)(x + y)
    double value_shape = 0.0;
    double dx_shape = 0.0;
    double dy_shape = 0.0;
    double hxx_shape = 0.0;
    double hxy_shape = 0.0;
    double hyy_shape = 0.0;

    double value() const { return std::exp(exponent) * value_shape; }
    double dx() const { return std::exp(exponent) * dx_shape; }
    double dy() const { return std::exp(exponent) * dy_shape; }
    double hxx() const { return std::exp(exponent) * hxx_shape; }
    double hxy() const { return std::exp(exponent) * hxy_shape; }
    double hyy() const { return std::exp(exponent) * hyy_shape; }
};

// Both throw std::domain_error for nonpositive distances.
FKernel f_kernel(double x, double absorption);
QKernel q_kernel(double x, double y, double absorption);

/// Coefficients of one link frozen at a reference UAV location.
struct ExpansionPoint
{
    Vec3 location;
    double C = 0.0;
    double D = 0.0;
    double ue_distance = 0.0;  // d_u'
    double irs_distance = 0.0; // r'
    double A = 0.0;
    double B = 0.0;
    double K = 0.0;
};

ExpansionPoint make_expansion_point(const Scenario &scenario, const Vec3 &location, std::span<const double> phases,
                                    int band, int ue);

// A^2 f(d) + C' B^2 f(r) + 2 D' q(d, r) at explicit distances.
double frozen_gain_at(const ExpansionPoint &ep, double ue_distance, double irs_distance);
// Same, at the distances of `uav` to the UE and to the IRS anchor.
double frozen_gain(const Scenario &scenario, const Vec3 &uav, const ExpansionPoint &ep, int ue);

/// First-order expansion zeta d + psi r + constant of frozen_gain around
/// (d_u', r').
struct TaylorCoefficients
{
    double zeta = 0.0;
    double psi = 0.0;
    double constant = 0.0;
};

TaylorCoefficients taylor_coefficients(const ExpansionPoint &ep);

// Affine; may go negative far from the expansion point.
inline double linearized_gain(const TaylorCoefficients &c, double ue_distance, double irs_distance)
{
    return c.zeta * ue_distance + c.psi * irs_distance + c.constant;
}

} // namespace thzuav
