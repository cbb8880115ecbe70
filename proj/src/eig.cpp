#include "ablab/eig.hpp"
#include "ablab/errors.hpp"
#include "ablab/potential.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ablab {

namespace {

using SpMat = Eigen::SparseMatrix<cd>;
using Mat = Eigen::MatrixXcd;

SpMat to_eigen(const SparseHermitian& A) {
    SpMat out(A.n, A.n);
    std::vector<Eigen::Triplet<cd>> trips;
    trips.reserve(A.values.size());
    for (int r = 0; r < A.n; ++r)
        for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
            trips.emplace_back(r, A.col_idx[k], A.values[k]);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

cd dot_m(const SparseHermitian& M, const std::vector<cd>& a, const std::vector<cd>& b) {
    // <a, b>_M = b^H M a
    std::vector<cd> Ma(a.size());
    spmv(M, a.data(), Ma.data());
    cd s{0, 0};
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(b[i]) * Ma[i];
    return s;
}

} // namespace

double m_norm(const SparseHermitian& M, const std::vector<cd>& v) {
    return std::sqrt(std::max(0.0, dot_m(M, v, v).real()));
}

double m_dot_abs(const SparseHermitian& M, const std::vector<cd>& a,
                 const std::vector<cd>& b) {
    return std::abs(dot_m(M, a, b));
}

SpectrumSlice solve_lowest(const AssembledSystem& sys, int count, double tol) {
    const int n = sys.stiffness.n;
    if (count < 1 || count > n) throw PreconditionError("solve_lowest: bad count");
    if (tol <= 0) throw PreconditionError("solve_lowest: bad tol");

    SpMat S = to_eigen(sys.stiffness);
    SpMat M = to_eigen(sys.mass);
    Eigen::SimplicialLDLT<SpMat> inv(S);
    if (inv.info() != Eigen::Success)
        throw NumericalError("solve_lowest: stiffness factorization failed");

    const int extra = std::min(n - count, std::max(4, count / 2 + 2));
    const int m = count + extra;

    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Mat X(n, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = cd(uni(rng), uni(rng));

    Eigen::VectorXd vals(m);
    Mat V;
    int it = 0;
    const int max_it = 500;
    double worst = 1e300;
    for (it = 1; it <= max_it; ++it) {
        X = inv.solve(M * X);
        // M-orthonormalize the block, then Rayleigh-Ritz
        Mat G = X.adjoint() * (M * X);
        Eigen::LLT<Mat> llt(G);
        if (llt.info() != Eigen::Success) {
            // block degenerated; re-seed the offending directions
            Eigen::HouseholderQR<Mat> qr(X);
            X = qr.householderQ() * Mat::Identity(n, m);
            G = X.adjoint() * (M * X);
            llt.compute(G);
            if (llt.info() != Eigen::Success)
                throw NumericalError("solve_lowest: block lost rank");
        }
        // G = U^H U with U = L^H, so X <- X U^{-1} is M-orthonormal
        X = llt.matrixL().solve(X.adjoint()).adjoint();
        Mat Sr = X.adjoint() * (S * X);
        Eigen::SelfAdjointEigenSolver<Mat> es((Sr + Sr.adjoint()) * 0.5);
        vals = es.eigenvalues();
        V = X * es.eigenvectors();

        // residuals of the wanted part
        worst = 0.0;
        for (int j = 0; j < count; ++j) {
            Eigen::VectorXcd r = S * V.col(j) - vals(j) * (M * V.col(j));
            worst = std::max(worst, r.norm());
        }
        if (worst <= tol) break;
        X = V;
    }
    if (worst > tol)
        throw NumericalError("solve_lowest: no convergence in iteration budget, best residual " +
                             std::to_string(worst));

    SpectrumSlice out;
    out.iterations = it;
    out.pairs.resize(count);
    for (int j = 0; j < count; ++j) {
        EigenPair& p = out.pairs[j];
        p.value = vals(j);
        p.vector.assign(V.col(j).data(), V.col(j).data() + n);
        double nm = m_norm(sys.mass, p.vector);
        for (auto& z : p.vector) z /= nm;
        std::vector<cd> Sv(n), Mv(n);
        spmv(sys.stiffness, p.vector.data(), Sv.data());
        spmv(sys.mass, p.vector.data(), Mv.data());
        double r2 = 0;
        for (int i = 0; i < n; ++i) {
            cd d = Sv[i] - p.value * Mv[i];
            r2 += std::norm(d);
        }
        p.residual = std::sqrt(r2);
    }
    out.gap_to_next = (count < m) ? vals(count) - vals(count - 1)
                                  : std::numeric_limits<double>::infinity();
    return out;
}

EigenPair make_magnetic_real(const EigenPair& pair, const std::vector<cd>& gauge,
                             const SparseHermitian& mass, double rel_gap,
                             double gap_threshold) {
    if ((int)pair.vector.size() != mass.n)
        throw PreconditionError("make_magnetic_real: size mismatch");
    if (gauge.size() != pair.vector.size())
        throw PreconditionError("make_magnetic_real: gauge size mismatch");
    if (rel_gap < gap_threshold)
        throw PreconditionError("make_magnetic_real: eigenvalue not simple enough (gap " +
                                std::to_string(rel_gap) + ")");
    const size_t n = pair.vector.size();
    // K v with (K x)_i = gauge_i conj(x_i); minimizing ||K(cv) - cv||_M over
    // |c|=1 gives c^2 = phase of <Kv, v>_M.
    std::vector<cd> Kv(n);
    for (size_t i = 0; i < n; ++i) Kv[i] = gauge[i] * std::conj(pair.vector[i]);
    cd g = dot_m(mass, Kv, pair.vector);
    cd c = (std::abs(g) == 0.0) ? cd(1, 0) : std::exp(cd(0, std::arg(g) / 2.0));

    EigenPair out;
    out.value = pair.value;
    out.vector.resize(n);
    for (size_t i = 0; i < n; ++i) out.vector[i] = c * pair.vector[i];
    std::vector<cd> diff(n);
    for (size_t i = 0; i < n; ++i)
        diff[i] = gauge[i] * std::conj(out.vector[i]) - out.vector[i];
    out.residual = m_norm(mass, diff);
    return out;
}

std::vector<cd> gauge_vector(const Mesh& mesh, const AssembledSystem& sys,
                             const PoleConfig& cfg) {
    std::vector<cd> g(sys.dof_to_vertex.size());
    for (size_t d = 0; d < g.size(); ++d)
        g[d] = gauge_double(cfg, mesh.vertices[sys.dof_to_vertex[d]]);
    return g;
}

double value_at_origin(const EigenPair& pair, const Mesh& mesh,
                       const AssembledSystem& sys) {
    if (mesh.origin_vertex < 0)
        throw PreconditionError("value_at_origin: origin is not a mesh vertex");
    int dof = sys.vertex_to_dof[mesh.origin_vertex];
    if (dof < 0) throw PreconditionError("value_at_origin: origin dof eliminated");
    return pair.vector[dof].real();
}

void fix_sign_at_origin(EigenPair& pair, const Mesh& mesh, const AssembledSystem& sys) {
    if (value_at_origin(pair, mesh, sys) < 0)
        for (auto& z : pair.vector) z = -z;
}

} // namespace ablab
