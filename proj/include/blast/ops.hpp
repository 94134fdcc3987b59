#pragma once

#include <cstdint>
#include <vector>

#include "blast/blast_matrix.hpp"
#include "blast/dense.hpp"
#include "blast/errors.hpp"

namespace blast {

namespace detail {

// Shared kernel: Y (N x m) from X (N x n), row k of Y = product with row k of X.
// Three stages: right-factor projections z_j = V_j^T x_j once per block-column,
// coupling-scaled accumulation over j in ascending order, then left-factor products.
// Per-sample arithmetic order is independent of N, so a batch row equals the
// single-vector result bitwise.
inline void apply_blocks(const BlastMatrix& A, const double* X, int N, double* Y,
                         std::int64_t* multiply_count) {
    const int b = A.b, r = A.r, p = A.p(), q = A.q();
    std::vector<double> Z(size_t(b) * N * r);
    for (int j = 0; j < b; ++j) {
        const double* Vj = A.V_block(j);
        for (int k = 0; k < N; ++k) {
            const double* xj = X + size_t(k) * A.n + size_t(j) * q;
            double* zjk = Z.data() + (size_t(j) * N + k) * r;
            for (int c = 0; c < r; ++c) {
                double acc = 0.0;
                for (int t = 0; t < q; ++t) acc += Vj[size_t(t) * r + c] * xj[t];
                zjk[c] = acc;
            }
        }
    }
    std::vector<double> w(r);
    for (int i = 0; i < b; ++i) {
        const double* Ui = A.U_block(i);
        for (int k = 0; k < N; ++k) {
            for (int c = 0; c < r; ++c) w[c] = 0.0;
            for (int j = 0; j < b; ++j) {
                const double* sij = A.s_vec(i, j);
                const double* zjk = Z.data() + (size_t(j) * N + k) * r;
                for (int c = 0; c < r; ++c) w[c] += sij[c] * zjk[c];
            }
            double* yik = Y + size_t(k) * A.m + size_t(i) * p;
            for (int t = 0; t < p; ++t) {
                double acc = 0.0;
                const double* Uit = Ui + size_t(t) * r;
                for (int c = 0; c < r; ++c) acc += Uit[c] * w[c];
                yik[t] = acc;
            }
        }
    }
    if (multiply_count)
        *multiply_count += std::int64_t(N) * (std::int64_t(A.n) * r + std::int64_t(b) * b * r +
                                              std::int64_t(A.m) * r);
}

}  // namespace detail

inline std::vector<double> matvec(const BlastMatrix& A, const std::vector<double>& x,
                                  std::int64_t* multiply_count = nullptr) {
    if (int(x.size()) != A.n)
        throw DimensionMismatch("vector length " + std::to_string(x.size()) +
                                " does not match column count " + std::to_string(A.n));
    if (!all_finite(x)) throw NonFiniteInput("input vector contains a non-finite entry");
    std::vector<double> y(A.m);
    detail::apply_blocks(A, x.data(), 1, y.data(), multiply_count);
    return y;
}

// Rows of X are samples; row k of the result equals matvec on row k.
inline DenseMatrix matmul(const BlastMatrix& A, const DenseMatrix& X) {
    if (X.n != A.n)
        throw DimensionMismatch("batch column count " + std::to_string(X.n) +
                                " does not match matrix column count " + std::to_string(A.n));
    X.require_finite("batch input");
    DenseMatrix Y(X.m, A.m);
    detail::apply_blocks(A, X.data.data(), X.m, Y.data.data(), nullptr);
    return Y;
}

inline DenseMatrix to_dense(const BlastMatrix& A) {
    const int b = A.b, r = A.r, p = A.p(), q = A.q();
    DenseMatrix D(A.m, A.n);
    for (int i = 0; i < b; ++i) {
        const double* Ui = A.U_block(i);
        for (int j = 0; j < b; ++j) {
            const double* Vj = A.V_block(j);
            const double* sij = A.s_vec(i, j);
            for (int t = 0; t < p; ++t) {
                double* drow = D.row(i * p + t) + size_t(j) * q;
                const double* Uit = Ui + size_t(t) * r;
                for (int u = 0; u < q; ++u) {
                    const double* Vju = Vj + size_t(u) * r;
                    double acc = 0.0;
                    for (int c = 0; c < r; ++c) acc += Uit[c] * sij[c] * Vju[c];
                    drow[u] = acc;
                }
            }
        }
    }
    return D;
}

// reference oracle, plain row-times-vector loops
inline std::vector<double> dense_matvec(const DenseMatrix& D, const std::vector<double>& x) {
    if (int(x.size()) != D.n)
        throw DimensionMismatch("vector length does not match dense column count");
    std::vector<double> y(D.m);
    for (int i = 0; i < D.m; ++i) {
        const double* row = D.row(i);
        double acc = 0.0;
        for (int j = 0; j < D.n; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

// dense counterpart of matmul: row k of the result is D times row k of X
inline DenseMatrix dense_apply(const DenseMatrix& D, const DenseMatrix& X) {
    if (X.n != D.n) throw DimensionMismatch("batch column count does not match dense matrix");
    DenseMatrix Y(X.m, D.m);
    for (int k = 0; k < X.m; ++k) {
        const double* xk = X.row(k);
        double* yk = Y.row(k);
        for (int i = 0; i < D.m; ++i) {
            const double* row = D.row(i);
            double acc = 0.0;
            for (int j = 0; j < D.n; ++j) acc += row[j] * xk[j];
            yk[i] = acc;
        }
    }
    return Y;
}

}  // namespace blast
