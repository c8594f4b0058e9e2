#include "thzuav/surrogate.hpp"

#include <stdexcept>

namespace thzuav {

FKernel f_kernel(double x, double absorption)
{
    if (!(x > 0.0))
        throw std::domain_error("f kernel needs x > 0");
    double kx2 = absorption * x + 2.0;
    double x2 = x * x;
    FKernel f;
    f.exponent = -absorption * x;
    f.value_shape = 1.0 / x2;
    f.first_shape = -kx2 / (x2 * x);
    f.second_shape = (kx2 * kx2 + 2.0) / (x2 * x2);
    return f;
}

QKernel q_kernel(double x, double y, double absorption)
{
    if (!(x > 0.0) || !(y > 0.0))
        throw std::domain_error("q kernel needs x > 0 and y > 0");
    double half = 0.5 * absorption;
    double ax = half * x + 1.0;
    double ay = half * y + 1.0;
    double base = 1.0 / (x * y);
    QKernel q;
    q.exponent = -half * (x + y);
    q.value_shape = base;
    q.dx_shape = -ax / x * base;
    q.dy_shape = -ay / y * base;
    q.hxx_shape = base * (ax * ax + 1.0) / (x * x);
    q.hxy_shape = base * ax * ay / (x * y);
    q.hyy_shape = base * (ay * ay + 1.0) / (y * y);
    return q;
}

ExpansionPoint make_expansion_point(const Scenario &scenario, const Vec3 &location, std::span<const double> phases,
                                    int band, int ue)
{
    GainDecomposition g = decompose_gain(scenario, location, phases, band, ue);
    ExpansionPoint ep;
    ep.location = location;
    ep.C = g.C;
    ep.D = g.D;
    ep.ue_distance = g.ue_distance;
    ep.irs_distance = g.irs_distance;
    ep.A = g.A;
    ep.B = g.B;
    ep.K = g.K;
    return ep;
}

double frozen_gain_at(const ExpansionPoint &ep, double ue_distance, double irs_distance)
{
    return ep.A * ep.A * f_kernel(ue_distance, ep.K).value() +
           ep.C * ep.B * ep.B * f_kernel(irs_distance, ep.K).value() +
           2.0 * ep.D * q_kernel(ue_distance, irs_distance, ep.K).value();
}

double frozen_gain(const Scenario &scenario, const Vec3 &uav, const ExpansionPoint &ep, int ue)
{
    LinkDistances L = distances(uav, scenario, ue);
    return frozen_gain_at(ep, L.ue_m, L.irs_m);
}

TaylorCoefficients taylor_coefficients(const ExpansionPoint &ep)
{
    double d = ep.ue_distance, r = ep.irs_distance;
    FKernel fd = f_kernel(d, ep.K);
    FKernel fr = f_kernel(r, ep.K);
    QKernel q = q_kernel(d, r, ep.K);
    double a2 = ep.A * ep.A;
    double cb2 = ep.C * ep.B * ep.B;

    TaylorCoefficients c;
    c.zeta = a2 * fd.first() + 2.0 * ep.D * q.dx();
    c.psi = cb2 * fr.first() + 2.0 * ep.D * q.dy();
    double at_point = a2 * fd.value() + cb2 * fr.value() + 2.0 * ep.D * q.value();
    c.constant = at_point - c.psi * r - c.zeta * d;
    return c;
}

} // namespace thzuav
