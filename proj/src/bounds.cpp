#include "ablab/bounds.hpp"
#include "ablab/errors.hpp"
#include "ablab/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>

namespace ablab {

CutoffParams::CutoffParams(double eps, double t) : epsilon(eps), tau(t) {
    if (!(eps > 0 && eps < 1)) throw PreconditionError("cutoff: epsilon outside (0,1)");
    if (!(t > 0 && t < 1)) throw PreconditionError("cutoff: tau outside (0,1)");
}

double rho(Vec2 x, const CutoffParams& p) {
    double r = norm(x);
    if (r <= p.epsilon) return 0.0;
    double outer = std::pow(p.epsilon, p.tau);
    if (r >= outer) return 1.0;
    return (std::log(r) - std::log(p.epsilon)) /
           (std::log(outer) - std::log(p.epsilon));
}

double grad_rho_sq(Vec2 x, const CutoffParams& p) {
    double r = norm(x);
    if (r <= p.epsilon || r >= std::pow(p.epsilon, p.tau)) return 0.0;
    double c = (p.tau - 1) * std::log(p.epsilon);  // positive
    return 1.0 / (c * c * r * r);
}

double cutoff_energy_closed(const CutoffParams& p) {
    return 2 * M_PI / ((p.tau - 1) * std::log(p.epsilon));
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fm, double fb, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    double left = (m - a) / 6 * (fa + 4 * flm + fm);
    double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
        return left + right + (left + right - whole) / 15;
    return simpson(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    double m = 0.5 * (a + b);
    return simpson(f, a, b, f(a), f(m), f(b), tol, 48);
}

} // namespace

double cutoff_energy_quadrature(const CutoffParams& p) {
    double outer = std::pow(p.epsilon, p.tau);
    auto f = [&](double r) { return 2 * M_PI * r * grad_rho_sq({r, 0}, p); };
    // integrand ~ 1/r: split on a geometric ladder for a well-scaled tolerance
    double total = 0, lo = p.epsilon;
    while (lo < outer) {
        double hi = std::min(outer, lo * 4);
        total += integrate(f, lo, hi, 1e-12 * cutoff_energy_closed(p));
        lo = hi;
    }
    return total;
}

double cutoff_energy(const CutoffParams& p) {
    double closed = cutoff_energy_closed(p);
    double quad = cutoff_energy_quadrature(p);
    if (std::abs(closed - quad) > 1e-8 * std::abs(closed))
        throw NumericalError("cutoff energy: closed form and quadrature disagree");
    return closed;
}

double cutoff_mass_defect(const CutoffParams& p) {
    double outer = std::pow(p.epsilon, p.tau);
    auto f = [&](double r) {
        double q = rho({r, 0}, p);
        return 2 * M_PI * r * (1 - q * q);
    };
    double inner_disk = M_PI * p.epsilon * p.epsilon;
    return inner_disk + integrate(f, p.epsilon, outer, 1e-13);
}

namespace {

std::vector<std::vector<double>> real_eigvecs(const SpectrumSlice& lap_slice, int N) {
    std::vector<std::vector<double>> u(N);
    for (int j = 0; j < N; ++j) {
        u[j].resize(lap_slice.pairs[j].vector.size());
        for (size_t i = 0; i < u[j].size(); ++i)
            u[j][i] = lap_slice.pairs[j].vector[i].real();
    }
    return u;
}

} // namespace

TestFunctionBasis build_test_basis(const Mesh& mesh, const AssembledSystem& magnetic,
                                   const AssembledSystem& laplacian,
                                   const SpectrumSlice& lap_slice, const PoleConfig& cfg,
                                   double tau) {
    if (lap_slice.pairs.empty()) throw PreconditionError("test basis: empty spectrum");
    CutoffParams p(2 * cfg.a, tau);
    if (std::pow(p.epsilon, tau) >= 1.0)
        throw PreconditionError("test basis: cutoff support exits the domain");
    int N = (int)lap_slice.pairs.size();
    auto u = real_eigvecs(lap_slice, N);

    TestFunctionBasis basis;
    basis.a = cfg.a;
    basis.tau = tau;
    basis.N = N;
    basis.vectors.assign(N, std::vector<cd>(magnetic.dof_to_vertex.size(), cd{0, 0}));
    for (size_t d = 0; d < magnetic.dof_to_vertex.size(); ++d) {
        int v = magnetic.dof_to_vertex[d];
        Vec2 x = mesh.vertices[v];
        double r = rho(x, p);
        if (r == 0.0) continue;
        int ld = laplacian.vertex_to_dof[v];
        if (ld < 0)
            throw PreconditionError("test basis: magnetic dof eliminated in laplacian");
        cd phase = std::exp(cd(0, phase_psi(cfg, x)));
        for (int j = 0; j < N; ++j) basis.vectors[j][d] = phase * r * u[j][ld];
    }
    return basis;
}

QuadFormMatrix assemble_M_matrix(const Mesh& mesh, const AssembledSystem& laplacian,
                                 const SpectrumSlice& lap_slice, const PoleConfig& cfg,
                                 double tau, int quad_order) {
    int N = (int)lap_slice.pairs.size();
    CutoffParams p(2 * cfg.a, tau);
    auto u = real_eigvecs(lap_slice, N);
    double lamN = lap_slice.pairs[N - 1].value;

    QuadFormMatrix q;
    q.N = N;
    q.a = cfg.a;
    q.tau = tau;
    q.m.assign((size_t)N * N, 0.0);

    const QuadratureRule& rule = triangle_rule(quad_order);
    const QuadratureRule& pole_rule = triangle_rule(10);
    std::vector<double> uval(N);
    for (const auto& t : mesh.triangles) {
        Vec2 p0 = mesh.vertices[t[0]], p1 = mesh.vertices[t[1]], p2 = mesh.vertices[t[2]];
        double area = 0.5 * cross(p1 - p0, p2 - p0);
        bool near_pole = false;
        for (int k = 0; k < 3; ++k)
            if (mesh.flags[t[k]] & VERTEX_POLE) near_pole = true;
        const QuadratureRule& r = near_pole ? pole_rule : rule;
        for (size_t qq = 0; qq < r.bary.size(); ++qq) {
            const auto& b = r.bary[qq];
            double w = r.weights[qq] * area;
            Vec2 x = b[0] * p0 + b[1] * p1 + b[2] * p2;
            double rh = rho(x, p);
            double gr = grad_rho_sq(x, p);
            if (rh == 0.0 && gr == 0.0) continue;
            for (int j = 0; j < N; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) {
                    int ld = laplacian.vertex_to_dof[t[k]];
                    if (ld >= 0) s += b[k] * u[j][ld];
                }
                uval[j] = s;
            }
            for (int j = 0; j < N; ++j)
                for (int k = j; k < N; ++k) {
                    double lj = lap_slice.pairs[j].value, lk = lap_slice.pairs[k].value;
                    q.at(j, k) +=
                        w * uval[j] * uval[k] * (0.5 * (lj + lk) * rh * rh + gr);
                }
        }
    }
    // the rho=1 region contributes (lambda_j+lambda_k)/2 * int u_j u_k, which the
    // loop above accumulated; orthonormality makes the completed diagonal
    // (lambda_j - lambda_N) + annulus corrections once lambda_N is subtracted
    for (int j = 0; j < N; ++j) q.at(j, j) -= lamN;
    for (int j = 0; j < N; ++j)
        for (int k = j + 1; k < N; ++k) q.at(k, j) = q.at(j, k);
    return q;
}

double max_eig_quadform(const QuadFormMatrix& q) {
    Eigen::MatrixXd m(q.N, q.N);
    for (int j = 0; j < q.N; ++j)
        for (int k = 0; k < q.N; ++k) m(j, k) = q.at(j, k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((m + m.transpose()) * 0.5);
    return es.eigenvalues()(q.N - 1);
}

double upper_bound(const Mesh& mesh, const AssembledSystem& magnetic,
                   const AssembledSystem& laplacian, const SpectrumSlice& lap_slice,
                   const PoleConfig& cfg, double tau) {
    TestFunctionBasis basis =
        build_test_basis(mesh, magnetic, laplacian, lap_slice, cfg, tau);
    int N = basis.N;
    int n = (int)magnetic.dof_to_vertex.size();
    Eigen::MatrixXcd V(n, N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < n; ++i) V(i, j) = basis.vectors[j][i];

    std::vector<cd> tmp(n), col(n);
    Eigen::MatrixXcd R(N, N), G(N, N);
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < n; ++i) col[i] = V(i, j);
        spmv(magnetic.stiffness, col.data(), tmp.data());
        for (int k = 0; k < N; ++k) {
            cd s{0, 0};
            for (int i = 0; i < n; ++i) s += std::conj(V(i, k)) * tmp[i];
            R(k, j) = s;
        }
        spmv(magnetic.mass, col.data(), tmp.data());
        for (int k = 0; k < N; ++k) {
            cd s{0, 0};
            for (int i = 0; i < n; ++i) s += std::conj(V(i, k)) * tmp[i];
            G(k, j) = s;
        }
    }
    R = (R + R.adjoint()) * 0.5;
    G = (G + G.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> gs(G);
    if (gs.eigenvalues()(0) <= 1e-10 * gs.eigenvalues()(N - 1))
        throw NumericalError("upper bound: Gram matrix singular");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(R, G);
    return es.eigenvalues()(N - 1);
}

} // namespace ablab
