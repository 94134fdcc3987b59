#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "blast/dense.hpp"
#include "blast/errors.hpp"

namespace blast {

// Block-partitioned matrix whose (i,j) block is U_i * diag(s_ij) * V_j^T.
// U_i is shared along block-row i, V_j along block-column j; s_ij couples them.
//
// Storage: U holds b row-major p*r blocks back to back, V holds b q*r blocks,
// S holds b*b coupling vectors of length r in row-major (i,j) order.
struct BlastMatrix {
    int m = 0, n = 0, b = 0, r = 0;
    std::vector<double> U;  // b * p * r
    std::vector<double> V;  // b * q * r
    std::vector<double> S;  // b * b * r

    int p() const { return m / b; }
    int q() const { return n / b; }

    double* U_block(int i) { return U.data() + size_t(i) * p() * r; }
    const double* U_block(int i) const { return U.data() + size_t(i) * p() * r; }
    double* V_block(int j) { return V.data() + size_t(j) * q() * r; }
    const double* V_block(int j) const { return V.data() + size_t(j) * q() * r; }
    double* s_vec(int i, int j) { return S.data() + (size_t(i) * b + j) * r; }
    const double* s_vec(int i, int j) const { return S.data() + (size_t(i) * b + j) * r; }

    bool all_finite() const {
        return blast::all_finite(U) && blast::all_finite(V) && blast::all_finite(S);
    }
};

inline std::int64_t param_count(const BlastMatrix& A) {
    return std::int64_t(A.m + A.n) * A.r + std::int64_t(A.r) * A.b * A.b;
}

// multiplications one structured matrix-vector product performs
inline std::int64_t matvec_flops(const BlastMatrix& A) {
    return (std::int64_t(A.m + A.n) + std::int64_t(A.b) * A.b) * A.r;
}

inline double compression_ratio(const BlastMatrix& A) {
    return 1.0 - double(param_count(A)) / (double(A.m) * double(A.n));
}

inline BlastMatrix new_blast(int m, int n, int b, int r, std::vector<double> U,
                             std::vector<double> V, std::vector<double> S) {
    if (m <= 0 || n <= 0 || b <= 0 || r <= 0)
        throw DimensionMismatch("m, n, b, r must all be positive");
    if (m % b != 0 || n % b != 0)
        throw DimensionMismatch("block count " + std::to_string(b) + " must divide both " +
                                std::to_string(m) + " and " + std::to_string(n));
    const int p = m / b, q = n / b;
    if (U.size() != size_t(b) * p * r)
        throw DimensionMismatch("left factors must hold " + std::to_string(b) + " blocks of " +
                                std::to_string(p) + "x" + std::to_string(r));
    if (V.size() != size_t(b) * q * r)
        throw DimensionMismatch("right factors must hold " + std::to_string(b) + " blocks of " +
                                std::to_string(q) + "x" + std::to_string(r));
    if (S.size() != size_t(b) * b * r)
        throw DimensionMismatch("coupling factors must hold " + std::to_string(b * b) +
                                " vectors of length " + std::to_string(r));
    if (!all_finite(U) || !all_finite(V) || !all_finite(S))
        throw NonFiniteInput("factor entries must be finite");
    BlastMatrix A;
    A.m = m;
    A.n = n;
    A.b = b;
    A.r = r;
    A.U = std::move(U);
    A.V = std::move(V);
    A.S = std::move(S);
    return A;
}

}  // namespace blast
