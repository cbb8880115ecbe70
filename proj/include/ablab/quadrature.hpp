#pragma once

#include <array>
#include <vector>

namespace ablab {

// Symmetric-free collapsed (Duffy) Gauss rule on the reference triangle.
// Barycentric nodes strictly interior, positive weights summing to 1,
// exact for total degree <= order.
struct QuadratureRule {
    int order = 0;
    std::vector<std::array<double, 3>> bary;
    std::vector<double> weights;
};

// Supported orders: 2, 6, 10.
const QuadratureRule& triangle_rule(int order);

// Gauss-Legendre nodes/weights on [0, 1].
void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w);

} // namespace ablab
