#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ablab {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

// Vertex flag bits used in the mesh text format.
enum : uint8_t {
    VERTEX_BOUNDARY = 1,
    VERTEX_SLIT = 2,
    VERTEX_POLE = 4,
    VERTEX_ORIGIN = 8,
};

struct DomainSpec {
    enum class Kind { disk, polygon } kind = Kind::disk;
    double radius = 1.0;       // disk only
    int boundary_segments = 256;  // disk only: inscribed regular polygon, one vertex at angle 0
    std::vector<Vec2> polygon; // polygon only: simple, CCW

    std::vector<Vec2> boundary_polygon() const;
    double area() const;
};

// Open polyline meshed as a slit: both sides topologically disconnected.
struct Obstacle {
    std::vector<Vec2> polyline;
};

// Sizing: h(x) = min(h_max, target_h_at_center + (growth_ratio - 1) * dist(x, nearest center)).
// Edge lengths grow geometrically by ~growth_ratio per ring away from each center.
struct GradingPolicy {
    std::vector<Vec2> centers;
    double target_h_at_center = 0.0; // 0 disables grading
    double growth_ratio = 1.15;      // in (1, 2]
};

struct MeshingOptions {
    double h_max = 0.1;
    GradingPolicy grading;
    double min_angle_deg = 20.0;
    size_t max_vertices = 2'000'000;
};

struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles; // CCW
    std::vector<uint8_t> flags;
    int origin_vertex = -1;          // -1 when the origin is not a mesh vertex
    std::vector<int> pole_vertices;  // indices of pole-flagged vertices, input order

    double total_area() const;
};

struct MeshQuality {
    double min_angle_deg = 0.0;
    double max_angle_deg = 0.0;
    double h_min = 0.0;
    double h_max = 0.0;
    size_t num_vertices = 0;
    size_t num_triangles = 0;
};

// Graded conforming triangulation with forced pole/origin vertices and an
// optional slit along `obstacle` (endpoints of the polyline are not duplicated,
// every interior polyline vertex appears exactly twice in the result).
Mesh generate_mesh(const DomainSpec& domain, const std::vector<Vec2>& poles,
                   const Obstacle* obstacle, const MeshingOptions& opt);

Mesh refine_uniform(const Mesh& mesh);

MeshQuality mesh_quality(const Mesh& mesh);

// Throws on broken conformity (bad orientation, non-manifold interior edges,
// dangling vertices, inconsistent slit pairing).
void check_conformity(const Mesh& mesh);

void write_mesh(const Mesh& mesh, std::ostream& os);
Mesh read_mesh(std::istream& is);
void write_mesh_file(const Mesh& mesh, const std::string& path);
Mesh read_mesh_file(const std::string& path);

} // namespace ablab
