#include "ablab/geometry.hpp"
#include "ablab/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ablab {

std::vector<Vec2> DomainSpec::boundary_polygon() const {
    if (kind == Kind::polygon) {
        if (polygon.size() < 3) throw PreconditionError("polygon domain needs >= 3 vertices");
        return polygon;
    }
    if (radius <= 0.0) throw PreconditionError("disk radius must be positive");
    if (boundary_segments < 8) throw PreconditionError("disk needs >= 8 boundary segments");
    std::vector<Vec2> poly(boundary_segments);
    for (int k = 0; k < boundary_segments; ++k) {
        double th = 2.0 * M_PI * k / boundary_segments;
        poly[k] = {radius * std::cos(th), radius * std::sin(th)};
    }
    return poly;
}

static double polygon_area(const std::vector<Vec2>& p) {
    double s = 0.0;
    for (size_t i = 0; i < p.size(); ++i) s += cross(p[i], p[(i + 1) % p.size()]);
    return 0.5 * s;
}

double DomainSpec::area() const { return polygon_area(boundary_polygon()); }

double Mesh::total_area() const {
    double s = 0.0;
    for (auto& t : triangles)
        s += 0.5 * cross(vertices[t[1]] - vertices[t[0]], vertices[t[2]] - vertices[t[0]]);
    return s;
}

// ---------------------------------------------------------------------------
// predicates (double with long-double fallback near ties)

static double orient2d(Vec2 a, Vec2 b, Vec2 c) {
    double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    double mag = std::abs((b.x - a.x) * (c.y - a.y)) + std::abs((b.y - a.y) * (c.x - a.x));
    if (std::abs(v) > 1e-12 * mag) return v;
    long double lv = ((long double)b.x - a.x) * ((long double)c.y - a.y) -
                     ((long double)b.y - a.y) * ((long double)c.x - a.x);
    return (double)lv;
}

// > 0 iff d strictly inside the circumcircle of CCW triangle (a,b,c)
static double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    auto det = [](long double ax, long double ay, long double bx, long double by,
                  long double cx, long double cy) {
        long double al = ax * ax + ay * ay;
        long double bl = bx * bx + by * by;
        long double cl = cx * cx + cy * cy;
        return ax * (by * cl - bl * cy) - ay * (bx * cl - bl * cx) + al * (bx * cy - by * cx);
    };
    double ax = a.x - d.x, ay = a.y - d.y;
    double bx = b.x - d.x, by = b.y - d.y;
    double cx = c.x - d.x, cy = c.y - d.y;
    double v = (double)det(ax, ay, bx, by, cx, cy);
    double scale = (ax * ax + ay * ay) * std::abs(bx * cy) + (bx * bx + by * by) * std::abs(ax * cy) +
                   (cx * cx + cy * cy) * std::abs(ax * by) + 1e-300;
    if (std::abs(v) > 1e-11 * scale) return v;
    return v; // long double path already used above
}

static Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c, double* radius = nullptr) {
    Vec2 ab = b - a, ac = c - a;
    double d = 2.0 * cross(ab, ac);
    double l1 = dot(ab, ab), l2 = dot(ac, ac);
    Vec2 cc = {a.x + (ac.y * l1 - ab.y * l2) / d, a.y + (ab.x * l2 - ac.x * l1) / d};
    if (radius) *radius = dist(cc, a);
    return cc;
}

// ---------------------------------------------------------------------------
// incremental Delaunay with Ruppert refinement

namespace {

struct Tri {
    std::array<int, 3> v;
    bool alive = true;
};

struct SubSeg {
    int u, v;
    int kind;  // VERTEX_BOUNDARY or VERTEX_SLIT
    int chain; // obstacle chain id, -1 for boundary
    double t0, t1;
    bool alive = true;
};

using EdgeKey = std::pair<int, int>;
static EdgeKey ekey(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

struct Triangulator {
    std::vector<Vec2> pts;
    std::vector<Tri> tris;
    std::map<EdgeKey, std::array<int, 2>> edge2tri;
    std::vector<SubSeg> segs;
    std::map<EdgeKey, int> seg_lookup;
    std::vector<Vec2> domain_poly;
    double scale = 1.0;
    size_t max_vertices = 2'000'000;
    int locate_hint = 0;

    int add_point(Vec2 p) {
        pts.push_back(p);
        return (int)pts.size() - 1;
    }

    void edge_add(int a, int b, int t) {
        auto [it, fresh] = edge2tri.try_emplace(ekey(a, b), std::array<int, 2>{-1, -1});
        auto& slot = it->second;
        if (slot[0] == -1) slot[0] = t;
        else if (slot[1] == -1) slot[1] = t;
        else throw NumericalError("non-manifold edge during triangulation");
    }

    void edge_remove(int a, int b, int t) {
        auto it = edge2tri.find(ekey(a, b));
        if (it == edge2tri.end()) return;
        if (it->second[0] == t) it->second[0] = it->second[1];
        it->second[1] = -1;
        if (it->second[0] == -1) edge2tri.erase(it);
    }

    int make_tri(int a, int b, int c) {
        tris.push_back({{a, b, c}, true});
        int id = (int)tris.size() - 1;
        edge_add(a, b, id);
        edge_add(b, c, id);
        edge_add(c, a, id);
        return id;
    }

    void kill_tri(int id) {
        Tri& t = tris[id];
        if (!t.alive) return;
        t.alive = false;
        edge_remove(t.v[0], t.v[1], id);
        edge_remove(t.v[1], t.v[2], id);
        edge_remove(t.v[2], t.v[0], id);
    }

    int neighbor(int tid, int a, int b) const {
        auto it = edge2tri.find(ekey(a, b));
        if (it == edge2tri.end()) return -1;
        if (it->second[0] == tid) return it->second[1];
        return it->second[0];
    }

    // walk-locate: triangle whose closure contains p
    int locate(Vec2 p, int hint) const {
        int cur = hint;
        if (cur < 0 || cur >= (int)tris.size() || !tris[cur].alive) cur = -1;
        if (cur < 0) {
            for (int i = (int)tris.size() - 1; i >= 0; --i)
                if (tris[i].alive) { cur = i; break; }
        }
        if (cur < 0) throw NumericalError("locate on empty triangulation");
        for (size_t steps = 0; steps < tris.size() + 16; ++steps) {
            const Tri& t = tris[cur];
            int next = -1;
            for (int i = 0; i < 3; ++i) {
                int a = t.v[i], b = t.v[(i + 1) % 3];
                if (orient2d(pts[a], pts[b], p) < 0.0) {
                    int nb = neighbor(cur, a, b);
                    if (nb >= 0) { next = nb; break; }
                }
            }
            if (next < 0) return cur;
            cur = next;
        }
        // fallback: exhaustive
        for (int i = 0; i < (int)tris.size(); ++i) {
            if (!tris[i].alive) continue;
            const Tri& t = tris[i];
            bool in = true;
            for (int k = 0; k < 3; ++k)
                if (orient2d(pts[t.v[k]], pts[t.v[(k + 1) % 3]], p) < 0.0) { in = false; break; }
            if (in) return i;
        }
        throw NumericalError("point location failed");
    }

    // Bowyer-Watson insertion; returns vertex id and appends created triangle
    // ids to `created` when non-null. Deduplicates coincident points.
    int insert(Vec2 p, int hint, std::vector<int>* created = nullptr) {
        if (pts.size() >= max_vertices)
            throw NumericalError("mesh refinement budget exceeded (vertex cap)");
        int t0 = locate(p, hint);
        for (int k = 0; k < 3; ++k) {
            int vid = tris[t0].v[k];
            if (dist(pts[vid], p) < 1e-13 * scale) return vid;
        }
        // cavity
        std::vector<int> cavity;
        std::set<int> in_cavity;
        std::deque<int> work{t0};
        in_cavity.insert(t0);
        while (!work.empty()) {
            int tid = work.front();
            work.pop_front();
            cavity.push_back(tid);
            const Tri& t = tris[tid];
            for (int i = 0; i < 3; ++i) {
                int nb = neighbor(tid, t.v[i], t.v[(i + 1) % 3]);
                if (nb < 0 || in_cavity.count(nb)) continue;
                const Tri& n = tris[nb];
                if (incircle(pts[n.v[0]], pts[n.v[1]], pts[n.v[2]], p) > 0.0) {
                    in_cavity.insert(nb);
                    work.push_back(nb);
                }
            }
        }
        // boundary directed edges; extend cavity over degenerate (collinear) ones
        std::vector<std::pair<int, int>> boundary;
        for (bool again = true; again;) {
            again = false;
            boundary.clear();
            for (int tid : cavity) {
                const Tri& t = tris[tid];
                for (int i = 0; i < 3; ++i) {
                    int a = t.v[i], b = t.v[(i + 1) % 3];
                    int nb = neighbor(tid, a, b);
                    if (nb >= 0 && in_cavity.count(nb)) continue;
                    if (orient2d(pts[a], pts[b], p) <= 0.0) {
                        if (nb < 0) throw NumericalError("degenerate insertion at hull");
                        in_cavity.insert(nb);
                        cavity.push_back(nb);
                        again = true;
                        break;
                    }
                    boundary.emplace_back(a, b);
                }
                if (again) break;
            }
        }
        int pid = add_point(p);
        for (int tid : cavity) kill_tri(tid);
        for (auto [a, b] : boundary) {
            int nt = make_tri(a, b, pid);
            if (created) created->push_back(nt);
            locate_hint = nt;
        }
        return pid;
    }

    // --- constrained subsegments ---

    void register_seg(int u, int v, int kind, int chain, double t0, double t1) {
        segs.push_back({u, v, kind, chain, t0, t1, true});
        seg_lookup[ekey(u, v)] = (int)segs.size() - 1;
    }

    bool seg_edge_present(const SubSeg& s) const {
        return edge2tri.count(ekey(s.u, s.v)) > 0;
    }

    // apex-based encroachment test (sufficient for Delaunay triangulations)
    bool seg_encroached(const SubSeg& s) const {
        auto it = edge2tri.find(ekey(s.u, s.v));
        if (it == edge2tri.end()) return true;
        Vec2 m = 0.5 * (pts[s.u] + pts[s.v]);
        double r2 = dot(pts[s.u] - m, pts[s.u] - m);
        for (int tid : it->second) {
            if (tid < 0) continue;
            for (int vid : tris[tid].v) {
                if (vid == s.u || vid == s.v) continue;
                Vec2 d = pts[vid] - m;
                if (dot(d, d) < r2 * (1.0 - 1e-12)) return true;
            }
        }
        return false;
    }

    bool point_encroaches(Vec2 p, const SubSeg& s) const {
        Vec2 m = 0.5 * (pts[s.u] + pts[s.v]);
        double r2 = dot(pts[s.u] - m, pts[s.u] - m);
        Vec2 d = p - m;
        return dot(d, d) < r2 * (1.0 - 1e-12);
    }

    void split_seg(int si, std::deque<int>* seg_queue, std::vector<int>* created) {
        SubSeg s = segs[si];
        segs[si].alive = false;
        seg_lookup.erase(ekey(s.u, s.v));
        Vec2 m = 0.5 * (pts[s.u] + pts[s.v]);
        int mid = insert(m, locate_hint, created);
        double tm = 0.5 * (s.t0 + s.t1);
        register_seg(s.u, mid, s.kind, s.chain, s.t0, tm);
        if (seg_queue) seg_queue->push_back((int)segs.size() - 1);
        register_seg(mid, s.v, s.kind, s.chain, tm, s.t1);
        if (seg_queue) seg_queue->push_back((int)segs.size() - 1);
    }
};

static bool point_in_polygon(const std::vector<Vec2>& poly, Vec2 p) {
    // winding number, robust enough for strictly interior/exterior queries
    int wn = 0;
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        Vec2 a = poly[i], b = poly[(i + 1) % n];
        if (a.y <= p.y) {
            if (b.y > p.y && orient2d(a, b, p) > 0.0) ++wn;
        } else {
            if (b.y <= p.y && orient2d(a, b, p) < 0.0) --wn;
        }
    }
    return wn != 0;
}

} // namespace

// ---------------------------------------------------------------------------

Mesh generate_mesh(const DomainSpec& domain, const std::vector<Vec2>& poles,
                   const Obstacle* obstacle, const MeshingOptions& opt) {
    if (opt.h_max <= 0.0) throw PreconditionError("h_max must be positive");
    const GradingPolicy& g = opt.grading;
    bool graded = g.target_h_at_center > 0.0 && !g.centers.empty();
    if (graded) {
        if (g.target_h_at_center > opt.h_max)
            throw PreconditionError("unsatisfiable grading: target_h_at_center > h_max");
        if (!(g.growth_ratio > 1.0 && g.growth_ratio <= 2.0))
            throw PreconditionError("growth_ratio must lie in (1, 2]");
    }

    std::vector<Vec2> poly = domain.boundary_polygon();
    if (polygon_area(poly) <= 0.0) throw PreconditionError("boundary polygon must be CCW");

    auto sizing = [&](Vec2 p) {
        double h = opt.h_max;
        if (graded) {
            double slope = g.growth_ratio - 1.0;
            for (const Vec2& c : g.centers)
                h = std::min(h, g.target_h_at_center + slope * dist(p, c));
        }
        return h;
    };

    Triangulator T;
    T.domain_poly = poly;
    T.max_vertices = opt.max_vertices;

    // bbox / super-triangle
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (auto& p : poly) {
        xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
    double w = std::max(xmax - xmin, ymax - ymin);
    T.scale = w;
    Vec2 c = {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
    double R = 100.0 * w;
    int s0 = T.add_point({c.x - 2.0 * R, c.y - R});
    int s1 = T.add_point({c.x + 2.0 * R, c.y - R});
    int s2 = T.add_point({c.x, c.y + 2.0 * R});
    T.make_tri(s0, s1, s2);

    // forced points: boundary polygon, obstacle polyline, poles, origin
    std::vector<Vec2> obstacle_pts;
    if (obstacle) {
        if (obstacle->polyline.size() < 2)
            throw PreconditionError("obstacle polyline needs >= 2 points");
        obstacle_pts = obstacle->polyline;
        // forced vertices lying on the polyline become polyline vertices
        std::vector<Vec2> forced = poles;
        forced.push_back({0.0, 0.0});
        for (const Vec2& f : forced) {
            for (size_t i = 0; i + 1 < obstacle_pts.size(); ++i) {
                Vec2 a = obstacle_pts[i], b = obstacle_pts[i + 1];
                if (dist(f, a) < 1e-12 || dist(f, b) < 1e-12) break;
                double L = dist(a, b);
                double t = dot(f - a, b - a) / (L * L);
                if (t <= 1e-9 || t >= 1.0 - 1e-9) continue;
                Vec2 proj = a + t * (b - a);
                if (dist(proj, f) < 1e-12 * T.scale) {
                    obstacle_pts.insert(obstacle_pts.begin() + i + 1, f);
                    break;
                }
            }
        }
    }

    std::vector<int> poly_ids(poly.size());
    for (size_t i = 0; i < poly.size(); ++i) poly_ids[i] = T.insert(poly[i], T.locate_hint);
    std::vector<int> obst_ids(obstacle_pts.size());
    for (size_t i = 0; i < obstacle_pts.size(); ++i)
        obst_ids[i] = T.insert(obstacle_pts[i], T.locate_hint);
    std::vector<int> pole_ids(poles.size());
    for (size_t i = 0; i < poles.size(); ++i) {
        if (!point_in_polygon(poly, poles[i]))
            throw PreconditionError("pole outside the domain polygon");
        pole_ids[i] = T.insert(poles[i], T.locate_hint);
    }
    int origin_id = -1;
    {
        Vec2 o{0.0, 0.0};
        bool on_poly_vertex = false;
        for (size_t i = 0; i < poly.size(); ++i)
            if (dist(poly[i], o) < 1e-13) { origin_id = poly_ids[i]; on_poly_vertex = true; }
        if (!on_poly_vertex && point_in_polygon(poly, o)) origin_id = T.insert(o, T.locate_hint);
    }

    // constraints
    for (size_t i = 0; i < poly.size(); ++i)
        T.register_seg(poly_ids[i], poly_ids[(i + 1) % poly.size()], VERTEX_BOUNDARY, -1,
                       (double)i, (double)i + 1.0);
    if (!obst_ids.empty())
        for (size_t i = 0; i + 1 < obst_ids.size(); ++i) {
            if (obst_ids[i] == obst_ids[i + 1])
                throw PreconditionError("degenerate obstacle segment");
            T.register_seg(obst_ids[i], obst_ids[i + 1], VERTEX_SLIT, 0, (double)i,
                           (double)i + 1.0);
        }

    // --- Ruppert refinement ---
    const double B = 1.0 / (2.0 * std::sin(opt.min_angle_deg * M_PI / 180.0));
    auto inside_domain = [&](Vec2 p) { return point_in_polygon(poly, p); };

    auto tri_bad = [&](int tid) -> int { // 0 good, 1 quality, 2 size
        const Tri& t = T.tris[tid];
        Vec2 a = T.pts[t.v[0]], b = T.pts[t.v[1]], cc = T.pts[t.v[2]];
        Vec2 centroid = (1.0 / 3.0) * (a + b + cc);
        if (!inside_domain(centroid)) return 0;
        double r;
        Vec2 center = circumcenter(a, b, cc, &r);
        double shortest = std::min({dist(a, b), dist(b, cc), dist(cc, a)});
        if (r / shortest > B) return 1;
        if (r > 0.58 * sizing(center)) return 2;
        return 0;
    };

    std::deque<int> seg_queue;
    for (int i = 0; i < (int)T.segs.size(); ++i) seg_queue.push_back(i);
    std::deque<int> tri_queue;
    std::map<int, int> attempts;

    auto drain_segs = [&](std::vector<int>* created) {
        while (!seg_queue.empty()) {
            int si = seg_queue.front();
            seg_queue.pop_front();
            if (!T.segs[si].alive) continue;
            if (T.seg_encroached(T.segs[si])) T.split_seg(si, &seg_queue, created);
        }
    };

    {
        std::vector<int> created;
        drain_segs(&created);
    }
    for (int i = 0; i < (int)T.tris.size(); ++i)
        if (T.tris[i].alive && tri_bad(i)) tri_queue.push_back(i);

    size_t guard = 0;
    while (!tri_queue.empty() || !seg_queue.empty()) {
        if (++guard > 50 * opt.max_vertices)
            throw NumericalError("mesh refinement failed to terminate");
        std::vector<int> created;
        if (!seg_queue.empty()) {
            drain_segs(&created);
        } else {
            int tid = tri_queue.front();
            tri_queue.pop_front();
            if (!T.tris[tid].alive || !tri_bad(tid)) continue;
            const Tri& t = T.tris[tid];
            double r;
            Vec2 cc = circumcenter(T.pts[t.v[0]], T.pts[t.v[1]], T.pts[t.v[2]], &r);
            // split any subsegment the circumcenter would encroach
            bool encroaches = false;
            for (int si = 0; si < (int)T.segs.size(); ++si) {
                if (!T.segs[si].alive) continue;
                if (T.point_encroaches(cc, T.segs[si])) {
                    T.split_seg(si, &seg_queue, &created);
                    encroaches = true;
                }
            }
            if (encroaches) {
                if (T.tris[tid].alive) tri_queue.push_back(tid);
            } else if (!inside_domain(cc)) {
                // circumcenter escaped (boundary curvature): give up on this
                // triangle after a few tries rather than looping forever
                if (++attempts[tid] < 3) tri_queue.push_back(tid);
            } else {
                T.insert(cc, tid, &created);
            }
        }
        for (int nt : created)
            if (T.tris[nt].alive && tri_bad(nt)) tri_queue.push_back(nt);
    }

    // --- extract interior mesh ---
    Mesh mesh;
    std::vector<int> remap(T.pts.size(), -1);
    std::vector<std::array<int, 3>> kept;
    for (const Tri& t : T.tris) {
        if (!t.alive) continue;
        Vec2 centroid = (1.0 / 3.0) * (T.pts[t.v[0]] + T.pts[t.v[1]] + T.pts[t.v[2]]);
        if (!inside_domain(centroid)) continue;
        kept.push_back(t.v);
    }
    for (auto& tv : kept)
        for (int k = 0; k < 3; ++k)
            if (remap[tv[k]] < 0) {
                remap[tv[k]] = (int)mesh.vertices.size();
                mesh.vertices.push_back(T.pts[tv[k]]);
            }
    mesh.flags.assign(mesh.vertices.size(), 0);
    for (auto& tv : kept) mesh.triangles.push_back({remap[tv[0]], remap[tv[1]], remap[tv[2]]});

    for (const SubSeg& s : T.segs) {
        if (!s.alive) continue;
        for (int v : {s.u, s.v})
            if (remap[v] >= 0) mesh.flags[remap[v]] |= (uint8_t)s.kind;
    }
    for (int pid : pole_ids)
        if (remap[pid] >= 0) {
            mesh.flags[remap[pid]] |= VERTEX_POLE;
            mesh.pole_vertices.push_back(remap[pid]);
        } else
            throw NumericalError("pole vertex lost during meshing");
    if (origin_id >= 0 && remap[origin_id] >= 0) {
        mesh.origin_vertex = remap[origin_id];
        mesh.flags[mesh.origin_vertex] |= VERTEX_ORIGIN;
    }

    // --- slit duplication: every interior chain vertex appears twice ---
    if (obstacle) {
        std::vector<const SubSeg*> chain;
        for (const SubSeg& s : T.segs)
            if (s.alive && s.kind == VERTEX_SLIT) chain.push_back(&s);
        std::sort(chain.begin(), chain.end(),
                  [](const SubSeg* a, const SubSeg* b) { return a->t0 < b->t0; });
        std::vector<int> chain_verts;
        for (size_t i = 0; i < chain.size(); ++i) {
            if (i == 0) chain_verts.push_back(remap[chain[i]->u]);
            chain_verts.push_back(remap[chain[i]->v]);
        }
        // incidence: vertex -> triangles
        std::vector<std::vector<int>> vtris(mesh.vertices.size());
        for (int ti = 0; ti < (int)mesh.triangles.size(); ++ti)
            for (int k = 0; k < 3; ++k) vtris[mesh.triangles[ti][k]].push_back(ti);
        for (size_t ci = 1; ci + 1 < chain_verts.size(); ++ci) {
            int v = chain_verts[ci];
            int vp = chain_verts[ci - 1], vn = chain_verts[ci + 1];
            Vec2 pv = mesh.vertices[v];
            double ang_next = std::atan2(mesh.vertices[vn].y - pv.y, mesh.vertices[vn].x - pv.x);
            double ang_prev = std::atan2(mesh.vertices[vp].y - pv.y, mesh.vertices[vp].x - pv.x);
            auto in_left_sector = [&](Vec2 q) {
                double a = std::atan2(q.y - pv.y, q.x - pv.x);
                double lo = ang_next;
                double span = ang_prev - ang_next;
                if (span < 0) span += 2.0 * M_PI;
                double da = a - lo;
                if (da < 0) da += 2.0 * M_PI;
                return da < span;
            };
            int dup = (int)mesh.vertices.size();
            mesh.vertices.push_back(pv);
            mesh.flags.push_back(mesh.flags[v]);
            bool used = false;
            for (int ti : vtris[v]) {
                auto& tv = mesh.triangles[ti];
                Vec2 centroid = (1.0 / 3.0) * (mesh.vertices[tv[0]] + mesh.vertices[tv[1]] +
                                               mesh.vertices[tv[2]]);
                if (!in_left_sector(centroid)) continue;
                for (int k = 0; k < 3; ++k)
                    if (tv[k] == v) tv[k] = dup;
                used = true;
            }
            if (!used) throw NumericalError("slit duplication found empty side");
        }
    }

    check_conformity(mesh);
    return mesh;
}

// ---------------------------------------------------------------------------

Mesh refine_uniform(const Mesh& mesh) {
    Mesh out;
    out.vertices = mesh.vertices;
    out.flags = mesh.flags;
    out.origin_vertex = mesh.origin_vertex;
    out.pole_vertices = mesh.pole_vertices;

    // count triangles per undirected edge to tell boundary/slit edges apart
    std::map<EdgeKey, int> edge_count;
    for (auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k) edge_count[ekey(t[k], t[(k + 1) % 3])]++;

    std::map<EdgeKey, int> midpoint;
    auto mid = [&](int a, int b) {
        EdgeKey k = ekey(a, b);
        auto it = midpoint.find(k);
        if (it != midpoint.end()) return it->second;
        int id = (int)out.vertices.size();
        out.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
        uint8_t f = 0;
        if (edge_count.at(k) == 1) {
            uint8_t common = mesh.flags[a] & mesh.flags[b];
            if (common & VERTEX_SLIT) f = VERTEX_SLIT;
            else f = VERTEX_BOUNDARY;
        }
        out.flags.push_back(f);
        midpoint[k] = id;
        return id;
    };

    for (auto& t : mesh.triangles) {
        int m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m20 = mid(t[2], t[0]);
        out.triangles.push_back({t[0], m01, m20});
        out.triangles.push_back({t[1], m12, m01});
        out.triangles.push_back({t[2], m20, m12});
        out.triangles.push_back({m01, m12, m20});
    }
    return out;
}

MeshQuality mesh_quality(const Mesh& mesh) {
    MeshQuality q;
    q.num_vertices = mesh.vertices.size();
    q.num_triangles = mesh.triangles.size();
    q.min_angle_deg = 180.0;
    q.max_angle_deg = 0.0;
    q.h_min = 1e300;
    q.h_max = 0.0;
    for (auto& t : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            Vec2 a = mesh.vertices[t[k]];
            Vec2 b = mesh.vertices[t[(k + 1) % 3]];
            Vec2 c = mesh.vertices[t[(k + 2) % 3]];
            double L = dist(a, b);
            q.h_min = std::min(q.h_min, L);
            q.h_max = std::max(q.h_max, L);
            Vec2 u = b - a, v = c - a;
            double ang = std::acos(std::clamp(dot(u, v) / (norm(u) * norm(v)), -1.0, 1.0));
            ang *= 180.0 / M_PI;
            q.min_angle_deg = std::min(q.min_angle_deg, ang);
            q.max_angle_deg = std::max(q.max_angle_deg, ang);
        }
    }
    return q;
}

void check_conformity(const Mesh& mesh) {
    std::map<EdgeKey, int> edge_count;
    std::vector<char> used(mesh.vertices.size(), 0);
    for (auto& t : mesh.triangles) {
        Vec2 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
        if (orient2d(a, b, c) <= 0.0) throw NumericalError("non-positive triangle orientation");
        for (int k = 0; k < 3; ++k) {
            edge_count[ekey(t[k], t[(k + 1) % 3])]++;
            used[t[k]] = 1;
        }
    }
    for (auto& [k, n] : edge_count)
        if (n > 2) throw NumericalError("edge shared by more than two triangles");
    for (size_t i = 0; i < mesh.vertices.size(); ++i)
        if (!used[i]) throw NumericalError("dangling vertex " + std::to_string(i));
    // coordinate duplicates must be slit pairs
    std::map<std::pair<double, double>, std::vector<int>> by_coord;
    for (size_t i = 0; i < mesh.vertices.size(); ++i)
        by_coord[{mesh.vertices[i].x, mesh.vertices[i].y}].push_back((int)i);
    for (auto& [xy, ids] : by_coord) {
        if (ids.size() == 1) continue;
        if (ids.size() > 2) throw NumericalError("vertex duplicated more than twice");
        for (int id : ids)
            if (!(mesh.flags[id] & VERTEX_SLIT))
                throw NumericalError("non-slit duplicate vertex");
    }
}

// ---------------------------------------------------------------------------

void write_mesh(const Mesh& mesh, std::ostream& os) {
    os << "vertices " << mesh.vertices.size() << " triangles " << mesh.triangles.size() << "\n";
    char buf[80];
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %d\n", mesh.vertices[i].x, mesh.vertices[i].y,
                      (int)mesh.flags[i]);
        os << buf;
    }
    for (auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
}

Mesh read_mesh(std::istream& is) {
    std::string kw1, kw2;
    size_t nv = 0, nt = 0;
    is >> kw1 >> nv >> kw2 >> nt;
    if (kw1 != "vertices" || kw2 != "triangles" || !is)
        throw PreconditionError("bad mesh header");
    Mesh mesh;
    mesh.vertices.resize(nv);
    mesh.flags.resize(nv);
    for (size_t i = 0; i < nv; ++i) {
        int f;
        is >> mesh.vertices[i].x >> mesh.vertices[i].y >> f;
        mesh.flags[i] = (uint8_t)f;
        if (f & VERTEX_ORIGIN) mesh.origin_vertex = (int)i;
        if (f & VERTEX_POLE) mesh.pole_vertices.push_back((int)i);
    }
    mesh.triangles.resize(nt);
    for (size_t i = 0; i < nt; ++i)
        is >> mesh.triangles[i][0] >> mesh.triangles[i][1] >> mesh.triangles[i][2];
    if (!is) throw PreconditionError("truncated mesh file");
    return mesh;
}

void write_mesh_file(const Mesh& mesh, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw PreconditionError("cannot open " + path + " for writing");
    write_mesh(mesh, os);
}

Mesh read_mesh_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw PreconditionError("cannot open " + path);
    return read_mesh(is);
}

} // namespace ablab
