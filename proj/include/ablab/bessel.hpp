#pragma once

// Independent Bessel-function oracle: power series evaluated in long double
// plus bracketed root-finding. Used to validate eigenvalue computations, so
// it deliberately shares no code with the FEM side.

namespace ablab {

double bessel_j0(double x);
double bessel_j1(double x);

// first positive zeros
double j0_zero1();   // ~2.404825557695773
double j1_zero1();   // ~3.831705970207512
double j_half_zero1(); // first zero of J_{1/2} ~ pi

// L2-normalized disk ground state at the origin: 1/(sqrt(pi)*J1(j01))
double disk_ground_origin_value();

} // namespace ablab
