#pragma once

#include "ablab/geometry.hpp"
#include "ablab/potential.hpp"
#include "ablab/quadrature.hpp"
#include "ablab/sparse.hpp"

namespace ablab {

struct AssemblyOptions {
    int quad_order = 6;       // order 10 is always used on pole-touching triangles
    int pole_quad_order = 10;
    bool serial = false;      // straightforward reference path (kept for testing)
};

struct AssembledSystem {
    SparseHermitian stiffness;
    SparseHermitian mass; // real symmetric, stored with zero imaginary parts
    std::vector<int> dof_to_vertex;
    std::vector<int> vertex_to_dof; // -1 for eliminated vertices
};

// P1 complex FEM for (i grad + A)^2 with Dirichlet elimination of
// boundary, slit and pole vertices.
AssembledSystem assemble_magnetic_field(const Mesh& mesh, const VectorField& A,
                                        const AssemblyOptions& opt = {});

// Same, with the two-pole potential; checks both poles are pole-flagged
// mesh vertices.
AssembledSystem assemble_magnetic(const Mesh& mesh, const PoleConfig& cfg,
                                  const AssemblyOptions& opt = {});

// Real Dirichlet Laplacian; eliminates boundary and slit vertices only
// (pole vertices remain free dofs).
AssembledSystem assemble_laplacian(const Mesh& mesh, const AssemblyOptions& opt = {});

double rayleigh_quotient(const AssembledSystem& sys, const std::vector<cd>& v);

} // namespace ablab
