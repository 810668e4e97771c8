#pragma once

#include <cmath>
#include <numbers>

namespace overtake
{

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle (double a)
{
    a = std::remainder (a, 2.0 * kPi);
    if (a <= -kPi)
        a += 2.0 * kPi;
    return a;
}

/// Shortest signed angular difference b - a, in (-pi, pi].
inline double angle_diff (double a, double b) { return wrap_angle (b - a); }

} // namespace overtake
