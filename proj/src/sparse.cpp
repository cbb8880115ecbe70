#include "ablab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace ablab {

cd SparseHermitian::at(int i, int j) const {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        if (col_idx[k] == j) return values[k];
    return {0.0, 0.0};
}

void spmv(const SparseHermitian& A, const cd* x, cd* y) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < A.n; ++i) {
        cd s{0.0, 0.0};
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) s += A.values[k] * x[A.col_idx[k]];
        y[i] = s;
    }
}

void spmv_serial(const SparseHermitian& A, const cd* x, cd* y) {
    for (int i = 0; i < A.n; ++i) {
        cd s{0.0, 0.0};
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) s += A.values[k] * x[A.col_idx[k]];
        y[i] = s;
    }
}

double hermiticity_residual(const SparseHermitian& A) {
    double worst = 0.0;
    for (int i = 0; i < A.n; ++i)
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            int j = A.col_idx[k];
            if (j < i) continue;
            worst = std::max(worst, std::abs(A.values[k] - std::conj(A.at(j, i))));
        }
    return worst;
}

void dump_matrix(const SparseHermitian& A, std::ostream& os) {
    char buf[96];
    for (int i = 0; i < A.n; ++i)
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g\n", i, A.col_idx[k],
                          A.values[k].real(), A.values[k].imag());
            os << buf;
        }
}

} // namespace ablab
