#pragma once

#include "ablab/fem.hpp"

#include <vector>

namespace ablab {

struct EigenPair {
    double value = 0.0;
    std::vector<cd> vector;  // M-normalized
    double residual = 0.0;   // ||S v - value M v||_2 with ||v||_M = 1
};

struct SpectrumSlice {
    std::vector<EigenPair> pairs;  // ascending
    double gap_to_next = 0.0;      // lambda_{count+1} - lambda_count (inf if full)
    int iterations = 0;
};

// Lowest `count` eigenpairs of the Hermitian pencil (S, M) by shift-invert
// subspace iteration (factorize S once, it is positive definite after
// Dirichlet elimination). Deterministic: fixed-seed start block.
SpectrumSlice solve_lowest(const AssembledSystem& sys, int count, double tol = 1e-10);

// Phase-align v so that K v = v as nearly as possible, where
// (K x)_i = gauge_i * conj(x_i). Returns the aligned pair with the achieved
// conjugation residual ||K w - w||_M stored in `residual`.
// `rel_gap` is the caller-known relative gap to the nearest other eigenvalue;
// below `gap_threshold` the alignment is refused as ill-conditioned.
EigenPair make_magnetic_real(const EigenPair& pair, const std::vector<cd>& gauge,
                             const SparseHermitian& mass, double rel_gap,
                             double gap_threshold = 1e-6);

// gauge_double evaluated at every free vertex of the system
std::vector<cd> gauge_vector(const Mesh& mesh, const AssembledSystem& sys,
                             const PoleConfig& cfg);

// Coefficient at the origin dof. Precondition: origin is a free marked vertex.
double value_at_origin(const EigenPair& pair, const Mesh& mesh,
                       const AssembledSystem& sys);

// Flip sign so the (real part of the) origin value is >= 0.
void fix_sign_at_origin(EigenPair& pair, const Mesh& mesh, const AssembledSystem& sys);

double m_norm(const SparseHermitian& M, const std::vector<cd>& v);
double m_dot_abs(const SparseHermitian& M, const std::vector<cd>& a,
                 const std::vector<cd>& b);

} // namespace ablab
