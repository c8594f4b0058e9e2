#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace thzuav {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend constexpr Vec3 operator+(const Vec3 &a, const Vec3 &b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(const Vec3 &a, const Vec3 &b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator*(double s, const Vec3 &a) { return {s * a.x, s * a.y, s * a.z}; }
    friend constexpr bool operator==(const Vec3 &, const Vec3 &) = default;
};

inline double norm(const Vec3 &v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }
inline double distance(const Vec3 &a, const Vec3 &b) { return norm(a - b); }

// Horizontal (x, y) distance; UAV positions share one altitude.
inline double planar_distance(const Vec3 &a, const Vec3 &b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Maps an angle into [0, 2pi).
inline double wrap_phase(double phase)
{
    double w = std::fmod(phase, kTwoPi);
    if (w < 0.0)
        w += kTwoPi;
    if (w >= kTwoPi)
        w = 0.0;
    return w;
}

// Shortest circular distance between two angles, in [0, pi].
inline double phase_distance(double a, double b)
{
    double d = std::fabs(wrap_phase(a) - wrap_phase(b));
    return d > kPi ? kTwoPi - d : d;
}

} // namespace thzuav
