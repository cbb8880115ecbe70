#include "ablab/nodal.hpp"
#include "ablab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace ablab {

namespace {

struct Site {
    Vec2 pos;
    int vertex;  // mesh vertex id when snapped, else -1
};

struct Dsu {
    std::vector<int> p;
    explicit Dsu(int n) : p(n) { for (int i = 0; i < n; ++i) p[i] = i; }
    int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
    void unite(int a, int b) { p[find(a)] = find(b); }
};

using FlipFn = std::function<int(int, int)>;

NodalGraph march(const Mesh& mesh, std::vector<double> val,
                 const std::vector<char>& pole, const FlipFn& flip,
                 const ExtractOptions& opt) {
    const size_t nv = mesh.vertices.size();
    double vmax = 0;
    for (size_t v = 0; v < nv; ++v)
        if (!pole[v]) vmax = std::max(vmax, std::abs(val[v]));
    if (vmax == 0) vmax = 1;
    const double tiny = 1e-14 * vmax;
    for (size_t v = 0; v < nv; ++v) {
        if (pole[v]) continue;
        if (val[v] == 0.0) val[v] = tiny;
        else if (std::abs(val[v]) < tiny) val[v] = std::copysign(tiny, val[v]);
    }

    std::vector<Site> sites;
    std::map<int, int> vert_site;
    auto vsite = [&](int v) {
        auto it = vert_site.find(v);
        if (it != vert_site.end()) return it->second;
        sites.push_back({mesh.vertices[v], v});
        vert_site[v] = (int)sites.size() - 1;
        return (int)sites.size() - 1;
    };
    std::map<std::pair<int, int>, int> edge_result;  // site id or -1
    auto ecross = [&](int u, int v) {
        if (u > v) std::swap(u, v);
        auto key = std::make_pair(u, v);
        auto it = edge_result.find(key);
        if (it != edge_result.end()) return it->second;
        double a = val[u];
        double b = (flip(u, v) & 1) ? -val[v] : val[v];
        int s = -1;
        if ((a > 0) != (b > 0)) {
            double t = a / (a - b);
            if (t < opt.snap_tol) s = vsite(u);
            else if (t > 1 - opt.snap_tol) s = vsite(v);
            else {
                Vec2 p = mesh.vertices[u] + t * (mesh.vertices[v] - mesh.vertices[u]);
                sites.push_back({p, -1});
                s = (int)sites.size() - 1;
            }
        }
        edge_result[key] = s;
        return s;
    };

    std::set<std::pair<int, int>> seg_set;
    std::vector<std::pair<int, int>> segs;
    auto add_seg = [&](int s1, int s2) {
        if (s1 == s2) return;
        if (s1 > s2) std::swap(s1, s2);
        if (seg_set.insert({s1, s2}).second) segs.push_back({s1, s2});
    };

    for (const auto& t : mesh.triangles) {
        int np = 0, pv = -1;
        for (int k = 0; k < 3; ++k)
            if (pole[t[k]]) { ++np; pv = t[k]; }
        if (np >= 2)
            throw PreconditionError("nodal extraction: poles share a triangle, mesh too coarse");
        if (np == 1) {
            int u = -1, v = -1;
            for (int k = 0; k < 3; ++k)
                if (t[k] != pv) (u < 0 ? u : v) = t[k];
            int s = ecross(u, v);
            if (s >= 0) add_seg(s, vsite(pv));
        } else {
            int cs[3], c = 0;
            for (int k = 0; k < 3; ++k) {
                int s = ecross(t[k], t[(k + 1) % 3]);
                if (s >= 0) cs[c++] = s;
            }
            // dedupe vertex-snapped repeats within the triangle
            if (c == 3) {
                if (cs[0] == cs[1]) { cs[1] = cs[2]; c = 2; }
                else if (cs[1] == cs[2] || cs[0] == cs[2]) c = 2;
            }
            if (c == 2) add_seg(cs[0], cs[1]);
            else if (c != 0)
                throw NumericalError("nodal extraction: unpaired crossing in a triangle");
        }
    }

    const int ns = (int)sites.size();
    std::vector<std::vector<int>> inc(ns);
    for (size_t k = 0; k < segs.size(); ++k) {
        inc[segs[k].first].push_back((int)k);
        inc[segs[k].second].push_back((int)k);
    }

    NodalGraph g;
    std::vector<int> node_of(ns, -1);
    auto mknode = [&](int s, NodeKind kind) {
        if (node_of[s] >= 0) return node_of[s];
        node_of[s] = (int)g.nodes.size();
        g.nodes.push_back({sites[s].pos, 0, kind});
        return node_of[s];
    };
    for (int s = 0; s < ns; ++s)
        if (sites[s].vertex >= 0 && pole[sites[s].vertex]) mknode(s, NodeKind::pole);
    for (int s = 0; s < ns; ++s)
        if (node_of[s] < 0 && !inc[s].empty() && inc[s].size() != 2)
            mknode(s, NodeKind::crossing);

    std::vector<char> used(segs.size(), 0);
    auto other = [&](int seg, int s) {
        return segs[seg].first == s ? segs[seg].second : segs[seg].first;
    };
    auto walk = [&](int s0, int k0) {
        NodalEdge e;
        e.node_a = node_of[s0];
        e.points.push_back(sites[s0].pos);
        int prev = k0, cur = other(k0, s0);
        used[k0] = 1;
        while (node_of[cur] < 0) {
            e.points.push_back(sites[cur].pos);
            int nxt = (inc[cur][0] == prev) ? inc[cur][1] : inc[cur][0];
            used[nxt] = 1;
            cur = other(nxt, cur);
            prev = nxt;
        }
        e.node_b = node_of[cur];
        e.points.push_back(sites[cur].pos);
        g.edges.push_back(std::move(e));
    };
    for (int s = 0; s < ns; ++s)
        if (node_of[s] >= 0)
            for (int k : inc[s])
                if (!used[k]) walk(s, k);
    // leftover pure cycles: one artificial degree-2 node each
    for (size_t k = 0; k < segs.size(); ++k)
        if (!used[k]) {
            int s0 = segs[k].first;
            mknode(s0, NodeKind::crossing);
            walk(s0, (int)k);
        }

    for (const auto& e : g.edges) {
        ++g.nodes[e.node_a].degree;
        ++g.nodes[e.node_b].degree;
    }
    for (auto& n : g.nodes)
        if (n.kind != NodeKind::pole) n.kind = n.degree == 1 ? NodeKind::endpoint : NodeKind::crossing;

    // components over nodes
    Dsu dsu((int)g.nodes.size());
    for (const auto& e : g.edges) dsu.unite(e.node_a, e.node_b);
    std::set<int> roots, edged_roots;
    for (int i = 0; i < (int)g.nodes.size(); ++i) roots.insert(dsu.find(i));
    for (const auto& e : g.edges) edged_roots.insert(dsu.find(e.node_a));
    g.b1 = (int)roots.size();

    // rotation-system face tracing: mu = 1 + sum over components of (F_c - 1)
    const int he = 2 * (int)g.edges.size();
    auto origin = [&](int h) { return h & 1 ? g.edges[h / 2].node_b : g.edges[h / 2].node_a; };
    auto dir = [&](int h) {
        const auto& pts = g.edges[h / 2].points;
        Vec2 d = (h & 1) ? pts[pts.size() - 2] - pts.back() : pts[1] - pts.front();
        return std::atan2(d.y, d.x);
    };
    std::vector<std::vector<int>> at_node(g.nodes.size());
    for (int h = 0; h < he; ++h) at_node[origin(h)].push_back(h);
    std::vector<int> pos_of(he, 0);
    for (auto& lst : at_node) {
        std::sort(lst.begin(), lst.end(), [&](int a, int b) {
            double da = dir(a), db = dir(b);
            return da != db ? da < db : a < b;
        });
        for (size_t i = 0; i < lst.size(); ++i) pos_of[lst[i]] = (int)i;
    }
    std::vector<char> seen(he, 0);
    int orbits = 0;
    for (int h0 = 0; h0 < he; ++h0) {
        if (seen[h0]) continue;
        ++orbits;
        int h = h0;
        do {
            seen[h] = 1;
            int r = h ^ 1;
            const auto& lst = at_node[origin(r)];
            int i = pos_of[r];
            h = lst[(i + (int)lst.size() - 1) % (int)lst.size()];
        } while (h != h0);
    }
    g.mu = 1 + orbits - (int)edged_roots.size();
    return g;
}

// branch of the two-pole phase with cuts leaving a+ upward and a- downward
double psi_cut(const PoleConfig& cfg, Vec2 x) {
    double tp = std::atan2(x.y, x.x - cfg.a);
    if (tp > M_PI / 2) tp -= 2 * M_PI;
    double tm = std::atan2(x.y, x.x + cfg.a);
    if (tm < -M_PI / 2) tm += 2 * M_PI;
    return 0.5 * (tp - tm);
}

// parity of cut-ray crossings of edge (p, q); on-cut points count as the
// x >= pole side so the predicate matches the branch of psi_cut
int cut_flips(const PoleConfig& cfg, Vec2 p, Vec2 q) {
    int f = 0;
    {
        bool sp = p.x >= cfg.a, sq = q.x >= cfg.a;
        if (sp != sq) {
            double t = (cfg.a - p.x) / (q.x - p.x);
            if (p.y + t * (q.y - p.y) > 0) ++f;
        }
    }
    {
        bool sp = p.x >= -cfg.a, sq = q.x >= -cfg.a;
        if (sp != sq) {
            double t = (-cfg.a - p.x) / (q.x - p.x);
            if (p.y + t * (q.y - p.y) < 0) ++f;
        }
    }
    return f;
}

} // namespace

NodalGraph extract_nodal_set(const Mesh& mesh, const AssembledSystem& sys,
                             const EigenPair& aligned, const PoleConfig& cfg,
                             const ExtractOptions& opt) {
    const size_t nv = mesh.vertices.size();
    if ((int)aligned.vector.size() != sys.stiffness.n)
        throw PreconditionError("extract_nodal_set: vector/system mismatch");
    std::vector<double> val(nv, 0.0);
    std::vector<char> have(nv, 0), pole(nv, 0);
    for (size_t v = 0; v < nv; ++v) pole[v] = (mesh.flags[v] & VERTEX_POLE) != 0;

    std::vector<cd> imag_part(aligned.vector.size());
    for (size_t d = 0; d < aligned.vector.size(); ++d) {
        int v = sys.dof_to_vertex[d];
        cd z = std::exp(cd(0, -psi_cut(cfg, mesh.vertices[v]))) * aligned.vector[d];
        val[v] = z.real();
        have[v] = 1;
        imag_part[d] = cd(z.imag(), 0.0);
    }
    double total = m_norm(sys.mass, aligned.vector);
    double ratio = m_norm(sys.mass, imag_part) / (total > 0 ? total : 1.0);
    if (ratio > opt.imag_ratio_threshold)
        throw PreconditionError("extract_nodal_set: field not magnetic-real, imaginary ratio " +
                                std::to_string(ratio));

    // eliminated vertices carry the sign of their free neighbours (transported
    // across the cuts) so the Dirichlet boundary does not spawn phantom arcs
    std::vector<double> nbsum(nv, 0.0);
    auto carry = [&](int to, int from) {
        if (!have[from]) return;
        int f = cut_flips(cfg, mesh.vertices[to], mesh.vertices[from]) & 1;
        nbsum[to] += f ? -val[from] : val[from];
    };
    for (const auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            carry(t[k], t[(k + 1) % 3]);
            carry(t[(k + 1) % 3], t[k]);
        }
    for (size_t v = 0; v < nv; ++v)
        if (!have[v] && !pole[v])
            val[v] = nbsum[v] < 0 ? -1e-300 : 1e-300;

    FlipFn flip = [&mesh, &cfg](int u, int v) {
        return cut_flips(cfg, mesh.vertices[u], mesh.vertices[v]);
    };
    return march(mesh, std::move(val), pole, flip, opt);
}

NodalGraph extract_from_field(const Mesh& mesh, const std::vector<double>& values,
                              const ExtractOptions& opt) {
    if (values.size() != mesh.vertices.size())
        throw PreconditionError("extract_from_field: value count mismatch");
    std::vector<char> pole(mesh.vertices.size(), 0);
    for (size_t v = 0; v < pole.size(); ++v)
        pole[v] = (mesh.flags[v] & VERTEX_POLE) != 0;
    FlipFn flip = [](int, int) { return 0; };
    return march(mesh, values, pole, flip, opt);
}

int euler_check(const NodalGraph& g) {
    // mu - b1 - sum(deg/2 - 1) - 1 with sum(deg) = 2E
    return g.mu - g.b1 - ((int)g.edges.size() - (int)g.nodes.size()) - 1;
}

namespace {

std::pair<int, int> pole_nodes(const NodalGraph& g, const PoleConfig& cfg) {
    int nm = -1, np = -1;
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        if (g.nodes[i].kind != NodeKind::pole) continue;
        if (dist(g.nodes[i].pos, cfg.pole_minus()) < 1e-12) nm = (int)i;
        if (dist(g.nodes[i].pos, cfg.pole_plus()) < 1e-12) np = (int)i;
    }
    if (nm < 0 || np < 0)
        throw NumericalError("nodal graph does not contain both poles");
    return {nm, np};
}

} // namespace

NodalStats nodal_stats(const NodalGraph& g, const PoleConfig& cfg) {
    auto [nm, np] = pole_nodes(g, cfg);
    Dsu dsu((int)g.nodes.size());
    for (const auto& e : g.edges) dsu.unite(e.node_a, e.node_b);
    if (dsu.find(nm) != dsu.find(np))
        throw NumericalError("poles lie in different nodal components");
    int root = dsu.find(nm);

    std::vector<Vec2> cloud;
    int comp_nodes = 0, comp_edges = 0;
    for (size_t i = 0; i < g.nodes.size(); ++i)
        if (dsu.find((int)i) == root) {
            ++comp_nodes;
            cloud.push_back(g.nodes[i].pos);
        }
    for (const auto& e : g.edges)
        if (dsu.find(e.node_a) == root) {
            ++comp_edges;
            cloud.insert(cloud.end(), e.points.begin(), e.points.end());
        }
    NodalStats st;
    for (size_t i = 0; i < cloud.size(); ++i)
        for (size_t j = i + 1; j < cloud.size(); ++j)
            st.d_a = std::max(st.d_a, dist(cloud[i], cloud[j]));
    st.single_arc = comp_nodes == 2 && comp_edges == 1 && g.nodes[nm].degree == 1 &&
                    g.nodes[np].degree == 1;
    st.log_ratio = std::abs(std::log(cfg.a)) / std::abs(std::log(st.d_a));
    return st;
}

namespace {

void douglas_peucker(const std::vector<Vec2>& pts, size_t i, size_t j, double tol,
                     std::vector<char>& keep) {
    if (j <= i + 1) return;
    Vec2 a = pts[i], b = pts[j];
    double len = dist(a, b);
    double worst = -1;
    size_t wk = i;
    for (size_t k = i + 1; k < j; ++k) {
        double d;
        if (len < 1e-300) d = dist(pts[k], a);
        else d = std::abs(cross(b - a, pts[k] - a)) / len;
        if (d > worst) { worst = d; wk = k; }
    }
    if (worst > tol) {
        keep[wk] = 1;
        douglas_peucker(pts, i, wk, tol, keep);
        douglas_peucker(pts, wk, j, tol, keep);
    }
}

} // namespace

Obstacle export_curve(const NodalGraph& g, const PoleConfig& cfg, double tol) {
    auto [nm, np] = pole_nodes(g, cfg);
    NodalStats st = nodal_stats(g, cfg);
    if (!st.single_arc)
        throw PreconditionError("export_curve: nodal component is not a single arc");
    const NodalEdge* arc = nullptr;
    for (const auto& e : g.edges)
        if ((e.node_a == nm && e.node_b == np) || (e.node_a == np && e.node_b == nm))
            arc = &e;
    if (!arc) throw NumericalError("export_curve: arc edge not found");

    std::vector<Vec2> pts = arc->points;
    if (pts.size() < 2) throw NumericalError("export_curve: degenerate arc polyline");
    if (arc->node_a == np) std::reverse(pts.begin(), pts.end());
    pts.front() = cfg.pole_minus();
    pts.back() = cfg.pole_plus();

    double sep = dist(cfg.pole_minus(), cfg.pole_plus());
    if (tol < 0) tol = 1e-5 * sep;
    std::vector<char> keep(pts.size(), 0);
    keep[0] = 1;
    keep[keep.size() - 1] = 1;
    douglas_peucker(pts, 0, pts.size() - 1, tol, keep);

    Obstacle out;
    double min_sp = 0.02 * sep;
    Vec2 last = pts.front();
    out.polyline.push_back(pts.front());
    for (size_t k = 1; k + 1 < pts.size(); ++k)
        if (keep[k] && dist(pts[k], last) >= min_sp && dist(pts[k], pts.back()) >= min_sp) {
            out.polyline.push_back(pts[k]);
            last = pts[k];
        }
    out.polyline.push_back(pts.back());
    return out;
}

void write_graph(const NodalGraph& g, std::ostream& os) {
    os.precision(17);
    os << "nodes " << g.nodes.size() << " edges " << g.edges.size() << " b1 " << g.b1
       << " mu " << g.mu << "\n";
    auto kind_str = [](NodeKind k) {
        return k == NodeKind::pole ? "pole" : k == NodeKind::endpoint ? "endpoint" : "crossing";
    };
    for (size_t i = 0; i < g.nodes.size(); ++i)
        os << "node " << i << " " << g.nodes[i].pos.x << " " << g.nodes[i].pos.y << " "
           << g.nodes[i].degree << " " << kind_str(g.nodes[i].kind) << "\n";
    for (size_t i = 0; i < g.edges.size(); ++i) {
        const auto& e = g.edges[i];
        os << "edge " << i << " " << e.node_a << " " << e.node_b << " " << e.points.size()
           << "\n";
        for (const auto& p : e.points) os << p.x << " " << p.y << "\n";
    }
}

NodalGraph read_graph(std::istream& is) {
    NodalGraph g;
    std::string tok;
    size_t nn, ne;
    if (!(is >> tok >> nn) || tok != "nodes") throw PreconditionError("graph: bad header");
    if (!(is >> tok >> ne) || tok != "edges") throw PreconditionError("graph: bad header");
    if (!(is >> tok >> g.b1) || tok != "b1") throw PreconditionError("graph: bad header");
    if (!(is >> tok >> g.mu) || tok != "mu") throw PreconditionError("graph: bad header");
    g.nodes.resize(nn);
    g.edges.resize(ne);
    for (size_t i = 0; i < nn; ++i) {
        size_t id;
        std::string kind;
        NodalNode& n = g.nodes[i];
        if (!(is >> tok >> id >> n.pos.x >> n.pos.y >> n.degree >> kind) || tok != "node" ||
            id != i)
            throw PreconditionError("graph: bad node line");
        n.kind = kind == "pole" ? NodeKind::pole
                                : kind == "endpoint" ? NodeKind::endpoint : NodeKind::crossing;
    }
    for (size_t i = 0; i < ne; ++i) {
        size_t id, npts;
        NodalEdge& e = g.edges[i];
        if (!(is >> tok >> id >> e.node_a >> e.node_b >> npts) || tok != "edge" || id != i)
            throw PreconditionError("graph: bad edge line");
        e.points.resize(npts);
        for (auto& p : e.points)
            if (!(is >> p.x >> p.y)) throw PreconditionError("graph: bad point");
    }
    return g;
}

void write_nodal_svg(const NodalGraph& g, const std::vector<Vec2>& outline,
                     const std::string& path) {
    std::ofstream os(path);
    if (!os) throw PreconditionError("cannot write " + path);
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    auto grow = [&](Vec2 p) {
        x0 = std::min(x0, p.x); x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y); y1 = std::max(y1, p.y);
    };
    for (const auto& p : outline) grow(p);
    for (const auto& n : g.nodes) grow(n.pos);
    if (x0 > x1) { x0 = y0 = -1; x1 = y1 = 1; }
    double pad = 0.05 * std::max(x1 - x0, y1 - y0);
    os.precision(10);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << x0 - pad << " "
       << y0 - pad << " " << (x1 - x0 + 2 * pad) << " " << (y1 - y0 + 2 * pad) << "\">\n";
    // flip y so the picture is in the usual orientation
    os << "<g transform=\"translate(0," << (y0 + y1) << ") scale(1,-1)\">\n";
    double lw = 0.004 * std::max(x1 - x0, y1 - y0);
    if (!outline.empty()) {
        os << "<polygon fill=\"none\" stroke=\"#888\" stroke-width=\"" << lw << "\" points=\"";
        for (const auto& p : outline) os << p.x << "," << p.y << " ";
        os << "\"/>\n";
    }
    for (const auto& e : g.edges) {
        os << "<polyline fill=\"none\" stroke=\"#c22\" stroke-width=\"" << 1.5 * lw
           << "\" points=\"";
        for (const auto& p : e.points) os << p.x << "," << p.y << " ";
        os << "\"/>\n";
    }
    for (const auto& n : g.nodes)
        os << "<circle cx=\"" << n.pos.x << "\" cy=\"" << n.pos.y << "\" r=\"" << 2 * lw
           << "\" fill=\"" << (n.kind == NodeKind::pole ? "#22c" : "#2a2") << "\"/>\n";
    os << "</g>\n</svg>\n";
}

} // namespace ablab
