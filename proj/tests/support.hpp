#pragma once

// Self-contained dense oracles for the test suite: a cyclic Jacobi eigensolver
// for complex Hermitian matrices plus a Cholesky pencil reduction. Kept
// independent of the library's solver stack on purpose, so agreement between
// the two routes is meaningful.

#include "ablab/sparse.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using cd = std::complex<double>;

struct Dense {
    int n = 0;
    std::vector<cd> a;
    explicit Dense(int n_ = 0) : n(n_), a((size_t)n_ * n_, cd{0, 0}) {}
    cd& at(int i, int j) { return a[(size_t)i * n + j]; }
    cd at(int i, int j) const { return a[(size_t)i * n + j]; }
};

inline Dense from_sparse(const ablab::SparseHermitian& A) {
    Dense D(A.n);
    for (int i = 0; i < A.n; ++i)
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            D.at(i, A.col_idx[k]) = A.values[k];
    return D;
}

// Cyclic Jacobi on a Hermitian matrix; returns ascending eigenvalues.
inline std::vector<double> jacobi_eigenvalues(Dense A, double tol = 1e-15) {
    int n = A.n;
    if (n == 0) return {};
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0, dia = 0;
        for (int i = 0; i < n; ++i) {
            dia += std::norm(A.at(i, i));
            for (int j = i + 1; j < n; ++j) off += std::norm(A.at(i, j));
        }
        if (off <= tol * tol * std::max(dia, 1e-300)) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                cd apq = A.at(p, q);
                double g = std::abs(apq);
                if (g < 1e-300) continue;
                double phi = std::arg(apq);
                double theta = (A.at(q, q).real() - A.at(p, p).real()) / (2 * g);
                double t = theta == 0 ? 1.0
                                      : (theta > 0 ? 1.0 : -1.0) /
                                            (std::abs(theta) + std::hypot(1.0, theta));
                double c = 1.0 / std::sqrt(1 + t * t), s = t * c;
                cd eph = std::polar(1.0, phi / 2);
                cd v00 = c * eph, v01 = s * eph;
                cd v10 = -s * std::conj(eph), v11 = c * std::conj(eph);
                for (int k = 0; k < n; ++k) {  // A <- A V on columns p, q
                    cd tp = A.at(k, p), tq = A.at(k, q);
                    A.at(k, p) = tp * v00 + tq * v10;
                    A.at(k, q) = tp * v01 + tq * v11;
                }
                for (int k = 0; k < n; ++k) {  // A <- V^H A on rows p, q
                    cd tp = A.at(p, k), tq = A.at(q, k);
                    A.at(p, k) = std::conj(v00) * tp + std::conj(v10) * tq;
                    A.at(q, k) = std::conj(v01) * tp + std::conj(v11) * tq;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = A.at(i, i).real();
    std::sort(ev.begin(), ev.end());
    return ev;
}

// M = L L^H, lower triangular L; throws when M is not positive definite.
inline Dense cholesky(const Dense& M) {
    int n = M.n;
    Dense L(n);
    for (int j = 0; j < n; ++j) {
        double d = M.at(j, j).real();
        for (int k = 0; k < j; ++k) d -= std::norm(L.at(j, k));
        if (!(d > 0)) throw std::runtime_error("oracle cholesky: not positive definite");
        L.at(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            cd v = M.at(i, j);
            for (int k = 0; k < j; ++k) v -= L.at(i, k) * std::conj(L.at(j, k));
            L.at(i, j) = v / L.at(j, j).real();
        }
    }
    return L;
}

// Eigenvalues of the pencil (S, M): Jacobi on L^{-1} S L^{-H}.
inline std::vector<double> pencil_eigenvalues(const Dense& S, const Dense& M) {
    int n = S.n;
    Dense L = cholesky(M);
    Dense X(n);  // X = L^{-1} S, forward substitution per column
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            cd v = S.at(i, j);
            for (int k = 0; k < i; ++k) v -= L.at(i, k) * X.at(k, j);
            X.at(i, j) = v / L.at(i, i).real();
        }
    Dense C(n);  // C = X L^{-H}: solve L Y = X^H, then C = Y^H
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            cd v = std::conj(X.at(j, i));
            for (int k = 0; k < i; ++k)
                v -= L.at(i, k) * std::conj(C.at(j, k));  // Y(k,j) = conj(C(j,k))
            C.at(j, i) = std::conj(v / L.at(i, i).real());
        }
    return jacobi_eigenvalues(C);
}

// Random matrix with the one-large-direction structure: last diagonal entry
// C*eps*(1+d1), the others K_j + d2 < 0, off-diagonal entries of size O(eps),
// |d..| <= 0.01. The largest eigenvalue must then sit within 10% of C*eps.
struct LemmaDraw {
    Dense m;
    double C = 0, eps = 0;
};

inline LemmaDraw lemma_matrix(std::mt19937& rng, double eps) {
    std::uniform_int_distribution<int> dim(1, 6);
    std::uniform_real_distribution<double> uC(0.5, 4.0), uK(-4.0, -0.5),
        ud(-0.01, 0.01), ue(-1.0, 1.0);
    int n = dim(rng);
    LemmaDraw d;
    d.C = uC(rng);
    d.eps = eps;
    d.m = Dense(n);
    for (int j = 0; j + 1 < n; ++j) d.m.at(j, j) = uK(rng) + ud(rng);
    d.m.at(n - 1, n - 1) = d.C * eps * (1 + ud(rng));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) d.m.at(i, j) = d.m.at(j, i) = eps * ue(rng);
    return d;
}

} // namespace oracle
