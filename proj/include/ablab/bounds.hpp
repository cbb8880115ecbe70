#pragma once

#include "ablab/eig.hpp"
#include "ablab/fem.hpp"
#include "ablab/geometry.hpp"
#include "ablab/potential.hpp"

#include <vector>

namespace ablab {

struct CutoffParams {
    double epsilon;
    double tau;
    CutoffParams(double eps, double t);  // validates 0 < eps < 1, 0 < tau < 1
};

// radial log-interpolation cut-off: 0 inside |x|<=eps, 1 outside |x|>=eps^tau
double rho(Vec2 x, const CutoffParams& p);

// |grad rho|^2 on the annulus, exact formula (not differenced)
double grad_rho_sq(Vec2 x, const CutoffParams& p);

// closed form 2*pi/((tau-1) log eps)
double cutoff_energy_closed(const CutoffParams& p);
// independent 1D adaptive-Simpson evaluation of the same integral
double cutoff_energy_quadrature(const CutoffParams& p);
// returns the closed form after checking the two routes agree to 1e-8
double cutoff_energy(const CutoffParams& p);

// integral of (1 - rho^2); always <= pi * eps^(2 tau)
double cutoff_mass_defect(const CutoffParams& p);

struct TestFunctionBasis {
    std::vector<std::vector<cd>> vectors;  // dof-indexed on the magnetic system
    double a = 0, tau = 0;
    int N = 0;
};

// v_j = e^{i psi_a} rho_{2a,tau} u_j sampled at the magnetic system's free
// vertices; the rho=0 disk covers the segment, so psi_a is never evaluated
// near its discontinuity
TestFunctionBasis build_test_basis(const Mesh& mesh, const AssembledSystem& magnetic,
                                   const AssembledSystem& laplacian,
                                   const SpectrumSlice& lap_slice, const PoleConfig& cfg,
                                   double tau);

struct QuadFormMatrix {
    int N = 0;
    double a = 0, tau = 0;
    std::vector<double> m;  // N*N row-major symmetric
    double& at(int j, int k) { return m[j * N + k]; }
    double at(int j, int k) const { return m[j * N + k]; }
};

// M_jk = (lambda_j+lambda_k)/2 * int rho^2 u_j u_k + int u_j u_k |grad rho|^2
//        - lambda_N delta_jk, by mesh quadrature with the exact grad-rho formula
QuadFormMatrix assemble_M_matrix(const Mesh& mesh, const AssembledSystem& laplacian,
                                 const SpectrumSlice& lap_slice, const PoleConfig& cfg,
                                 double tau, int quad_order = 6);

double max_eig_quadform(const QuadFormMatrix& q);

// largest eigenvalue of the magnetic form restricted to span{v_j}: an upper
// bound for the discrete lambda_N^a by minimax
double upper_bound(const Mesh& mesh, const AssembledSystem& magnetic,
                   const AssembledSystem& laplacian, const SpectrumSlice& lap_slice,
                   const PoleConfig& cfg, double tau);

} // namespace ablab
