#pragma once

#include "ablab/geometry.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace ablab {

// Two poles on the horizontal axis at (-a, 0) and (+a, 0), circulation 1/2
// each with opposite orientation: A = -A_{minus} + A_{plus}.
struct PoleConfig {
    double a = 0.1;

    Vec2 pole_minus() const { return {-a, 0.0}; }
    Vec2 pole_plus() const { return {a, 0.0}; }
};

// Half-circulation potential of a single pole p:
//   A_p(x) = (1/2) * (-(x2-p2), x1-p1) / |x-p|^2
Vec2 eval_single_A(Vec2 pole, Vec2 x);

Vec2 eval_A(const PoleConfig& cfg, Vec2 x);

// psi_a(x) = (theta_plus - theta_minus)/2 with principal-branch angles in
// (-pi, pi]. Smooth off the closed segment s_a = [-a,a]x{0}; grad psi_a = A.
// Throws on points within 1e-12 of s_a.
double phase_psi(const PoleConfig& cfg, Vec2 x);

// exp(2 i psi_a); continuous across the open segment (value -1 there).
// Throws only within 1e-12 of a pole.
std::complex<double> gauge_double(const PoleConfig& cfg, Vec2 x);

// (1/2pi) * loop integral of A along the closed polyline, per-segment
// Gauss(8) with adaptive splitting near the poles.
double winding_integral(const PoleConfig& cfg, const std::vector<Vec2>& closed_polyline);

using VectorField = std::function<Vec2(Vec2)>;

VectorField two_pole_field(const PoleConfig& cfg);
VectorField single_pole_field(Vec2 pole);

// A - grad(psi_a): the gauge-reduced potential, identically zero off s_a.
// Assembling the magnetic form with this field realizes the unitary
// equivalence with the plain Laplacian on a mesh slit along s_a.
VectorField gauge_reduced_field(const PoleConfig& cfg);

} // namespace ablab
