#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

namespace ablab {

using cd = std::complex<double>;

// CSR with the full (not triangular) pattern; values of a Hermitian matrix.
struct SparseHermitian {
    int n = 0;
    std::vector<int> row_ptr;
    std::vector<int> col_idx;
    std::vector<cd> values;

    size_t nnz() const { return values.size(); }
    cd at(int i, int j) const; // 0 when outside the pattern
};

void spmv(const SparseHermitian& A, const cd* x, cd* y);        // OpenMP over rows
void spmv_serial(const SparseHermitian& A, const cd* x, cd* y); // reference

// max_ij |A_ij - conj(A_ji)|
double hermiticity_residual(const SparseHermitian& A);

// debug dump: one "i j re im" line per stored entry, row-major
void dump_matrix(const SparseHermitian& A, std::ostream& os);

} // namespace ablab
