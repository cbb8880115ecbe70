#pragma once

#include "ablab/eig.hpp"
#include "ablab/fem.hpp"
#include "ablab/geometry.hpp"
#include "ablab/potential.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ablab {

enum class NodeKind { pole, crossing, endpoint };

struct NodalNode {
    Vec2 pos;
    int degree = 0;
    NodeKind kind = NodeKind::crossing;
};

struct NodalEdge {
    int node_a = -1;
    int node_b = -1;
    std::vector<Vec2> points;  // polyline including both node positions
};

struct NodalGraph {
    std::vector<NodalNode> nodes;
    std::vector<NodalEdge> edges;
    int b1 = 0;  // connected components
    int mu = 0;  // faces including the unbounded one, by rotation-system tracing
};

struct NodalStats {
    double d_a = 0.0;
    bool single_arc = false;
    double log_ratio = 0.0;
};

struct ExtractOptions {
    // max allowed ||Im||_M / ||.||_M of the derotated field; P1 interpolation
    // of the gauge phase leaves an O(h)-scale imaginary remainder, so this sits
    // far above round-off on purpose
    double imag_ratio_threshold = 0.05;
    double snap_tol = 1e-9;  // edge-crossing parameter distance for vertex snapping
};

// Zero set of an aligned magnetic eigenvector. The field is derotated by a
// branch of the gauge phase whose cuts leave each pole vertically (up from
// a+, down from a-); edges crossing a cut compare signs on the double cover,
// which makes an odd number of arcs terminate at each pole.
NodalGraph extract_nodal_set(const Mesh& mesh, const AssembledSystem& sys,
                             const EigenPair& aligned, const PoleConfig& cfg,
                             const ExtractOptions& opt = {});

// Marching on an explicit per-vertex real field (synthetic inputs); values at
// pole-flagged vertices are ignored, all other vertices use the given value.
NodalGraph extract_from_field(const Mesh& mesh, const std::vector<double>& values,
                              const ExtractOptions& opt = {});

// mu - b1 - sum_v(deg/2 - 1) - 1; zero for a consistently embedded extraction
int euler_check(const NodalGraph& g);

NodalStats nodal_stats(const NodalGraph& g, const PoleConfig& cfg);

// Pole-to-pole arc as a slit polyline, oriented a- to a+, endpoints bit-exact.
// Interior points are decimated to tolerance `tol` (default 2e-4 of the pole
// separation) and thinned to a minimum spacing so re-meshing stays bounded.
Obstacle export_curve(const NodalGraph& g, const PoleConfig& cfg, double tol = -1.0);

void write_graph(const NodalGraph& g, std::ostream& os);
NodalGraph read_graph(std::istream& is);
void write_nodal_svg(const NodalGraph& g, const std::vector<Vec2>& outline,
                     const std::string& path);

} // namespace ablab
