#include "ablab/fem.hpp"
#include "ablab/errors.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace ablab {

namespace {

struct Local {
    std::array<int, 3> dof;   // -1 eliminated
    cd S[3][3];
    double M[3][3];
};

// rotate so the smallest vertex id leads: local matrices become independent
// of how the triangle was stored
std::array<int, 3> canonical(const std::array<int, 3>& t) {
    int k = 0;
    if (t[1] < t[k]) k = 1;
    if (t[2] < t[k]) k = 2;
    return {t[k], t[(k + 1) % 3], t[(k + 2) % 3]};
}

void local_matrices(const Mesh& mesh, const std::array<int, 3>& tv, const VectorField* A,
                    const QuadratureRule& rule, Local& out) {
    Vec2 p0 = mesh.vertices[tv[0]], p1 = mesh.vertices[tv[1]], p2 = mesh.vertices[tv[2]];
    double area = 0.5 * cross(p1 - p0, p2 - p0);
    Vec2 g[3] = {{(p1.y - p2.y) / (2 * area), (p2.x - p1.x) / (2 * area)},
                 {(p2.y - p0.y) / (2 * area), (p0.x - p2.x) / (2 * area)},
                 {(p0.y - p1.y) / (2 * area), (p1.x - p0.x) / (2 * area)}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            out.S[i][j] = 0.0;
            out.M[i][j] = 0.0;
        }
    const cd I(0.0, 1.0);
    for (size_t q = 0; q < rule.bary.size(); ++q) {
        const auto& b = rule.bary[q];
        double w = rule.weights[q] * area;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j <= i; ++j) out.M[i][j] += w * b[i] * b[j];
        if (A) {
            Vec2 x = b[0] * p0 + b[1] * p1 + b[2] * p2;
            Vec2 Ax = (*A)(x);
            cd P[3][2];
            for (int i = 0; i < 3; ++i) {
                P[i][0] = I * g[i].x + Ax.x * b[i];
                P[i][1] = I * g[i].y + Ax.y * b[i];
            }
            // row i tests, column j trials: S_ij = sum_q w conj(D phi_i) . D phi_j
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j <= i; ++j)
                    out.S[i][j] +=
                        w * (std::conj(P[i][0]) * P[j][0] + std::conj(P[i][1]) * P[j][1]);
        }
    }
    if (!A)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j <= i; ++j) out.S[i][j] = area * dot(g[i], g[j]);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            out.S[i][j] = std::conj(out.S[j][i]);
            out.M[i][j] = out.M[j][i];
        }
}

AssembledSystem assemble(const Mesh& mesh, const VectorField* A, uint8_t eliminate_mask,
                         const AssemblyOptions& opt) {
    AssembledSystem sys;
    size_t nv = mesh.vertices.size();
    sys.vertex_to_dof.assign(nv, -1);
    for (size_t v = 0; v < nv; ++v)
        if (!(mesh.flags[v] & eliminate_mask)) {
            sys.vertex_to_dof[v] = (int)sys.dof_to_vertex.size();
            sys.dof_to_vertex.push_back((int)v);
        }
    int n = (int)sys.dof_to_vertex.size();
    if (n == 0) throw PreconditionError("all vertices eliminated");

    const QuadratureRule& rule = triangle_rule(opt.quad_order);
    const QuadratureRule& pole_rule = triangle_rule(opt.pole_quad_order);
    auto pick_rule = [&](const std::array<int, 3>& tv) -> const QuadratureRule& {
        for (int v : tv)
            if (mesh.flags[v] & VERTEX_POLE) return pole_rule;
        return rule;
    };

    size_t nt = mesh.triangles.size();
    // canonical processing order: sort triangles by vertex-id key so the
    // accumulation order (and hence every rounding) is independent of the
    // order triangles are stored in
    std::vector<int> order(nt);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::array<int, 3>> canon(nt);
    for (size_t t = 0; t < nt; ++t) canon[t] = canonical(mesh.triangles[t]);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return canon[a] < canon[b]; });

    std::vector<Local> locals(nt);
    if (opt.serial) {
        for (size_t t = 0; t < nt; ++t)
            local_matrices(mesh, canon[t], A, pick_rule(canon[t]), locals[t]);
    } else {
#pragma omp parallel for schedule(static)
        for (long t = 0; t < (long)nt; ++t)
            local_matrices(mesh, canon[t], A, pick_rule(canon[t]), locals[t]);
    }
    for (size_t t = 0; t < nt; ++t)
        for (int k = 0; k < 3; ++k) locals[t].dof[k] = sys.vertex_to_dof[canon[t][k]];

    // pattern
    std::vector<std::vector<int>> cols(n);
    for (size_t t = 0; t < nt; ++t)
        for (int i = 0; i < 3; ++i) {
            int r = locals[t].dof[i];
            if (r < 0) continue;
            for (int j = 0; j < 3; ++j) {
                int c = locals[t].dof[j];
                if (c >= 0) cols[r].push_back(c);
            }
        }
    SparseHermitian S, M;
    S.n = M.n = n;
    S.row_ptr.assign(n + 1, 0);
    for (int r = 0; r < n; ++r) {
        auto& cl = cols[r];
        std::sort(cl.begin(), cl.end());
        cl.erase(std::unique(cl.begin(), cl.end()), cl.end());
        S.row_ptr[r + 1] = S.row_ptr[r] + (int)cl.size();
    }
    S.col_idx.reserve(S.row_ptr[n]);
    for (int r = 0; r < n; ++r)
        S.col_idx.insert(S.col_idx.end(), cols[r].begin(), cols[r].end());
    S.values.assign(S.col_idx.size(), cd{0.0, 0.0});
    M.row_ptr = S.row_ptr;
    M.col_idx = S.col_idx;
    M.values.assign(S.col_idx.size(), cd{0.0, 0.0});

    auto slot = [&](int r, int c) {
        auto first = S.col_idx.begin() + S.row_ptr[r];
        auto last = S.col_idx.begin() + S.row_ptr[r + 1];
        return S.row_ptr[r] + (int)(std::lower_bound(first, last, c) - first);
    };
    for (size_t oi = 0; oi < nt; ++oi) {
        const Local& L = locals[order[oi]];
        for (int i = 0; i < 3; ++i) {
            int r = L.dof[i];
            if (r < 0) continue;
            for (int j = 0; j < 3; ++j) {
                int c = L.dof[j];
                if (c < 0) continue;
                int k = slot(r, c);
                S.values[k] += L.S[i][j];
                M.values[k] += L.M[i][j];
            }
        }
    }
    sys.stiffness = std::move(S);
    sys.mass = std::move(M);
    return sys;
}

} // namespace

AssembledSystem assemble_magnetic_field(const Mesh& mesh, const VectorField& A,
                                        const AssemblyOptions& opt) {
    return assemble(mesh, &A, VERTEX_BOUNDARY | VERTEX_SLIT | VERTEX_POLE, opt);
}

AssembledSystem assemble_magnetic(const Mesh& mesh, const PoleConfig& cfg,
                                  const AssemblyOptions& opt) {
    for (Vec2 pole : {cfg.pole_minus(), cfg.pole_plus()}) {
        bool found = false;
        for (int v : mesh.pole_vertices)
            if (dist(mesh.vertices[v], pole) < 1e-12) found = true;
        if (!found) throw PreconditionError("pole is not a pole-flagged mesh vertex");
    }
    VectorField A = two_pole_field(cfg);
    return assemble_magnetic_field(mesh, A, opt);
}

AssembledSystem assemble_laplacian(const Mesh& mesh, const AssemblyOptions& opt) {
    return assemble(mesh, nullptr, VERTEX_BOUNDARY | VERTEX_SLIT, opt);
}

double rayleigh_quotient(const AssembledSystem& sys, const std::vector<cd>& v) {
    if ((int)v.size() != sys.stiffness.n) throw PreconditionError("rayleigh: size mismatch");
    std::vector<cd> Sv(v.size()), Mv(v.size());
    spmv(sys.stiffness, v.data(), Sv.data());
    spmv(sys.mass, v.data(), Mv.data());
    cd num{0, 0}, den{0, 0};
    for (size_t i = 0; i < v.size(); ++i) {
        num += std::conj(v[i]) * Sv[i];
        den += std::conj(v[i]) * Mv[i];
    }
    if (std::abs(den) == 0.0) throw PreconditionError("rayleigh: zero M-norm");
    return num.real() / den.real();
}

} // namespace ablab
