#pragma once

#include <array>

namespace overtake
{

/// 8-point Gauss-Legendre nodes and weights on [-1, 1]; exact for degree <= 15.
struct GaussLegendre8
{
    static constexpr std::array<double, 8> nodes{
        -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
        0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
    static constexpr std::array<double, 8> weights{
        0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
        0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
};

template <class F> double gauss_legendre (double a, double b, F &&f)
{
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t k = 0; k < GaussLegendre8::nodes.size (); ++k)
        sum += GaussLegendre8::weights[k] * f (mid + half * GaussLegendre8::nodes[k]);
    return sum * half;
}

} // namespace overtake
