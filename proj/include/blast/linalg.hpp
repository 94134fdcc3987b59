#pragma once

#include <cmath>
#include <vector>

#include "blast/dense.hpp"
#include "blast/errors.hpp"

namespace blast {

struct SigmaResult {
    double value = 0.0;
    bool converged = false;
    // safe value for step-size use: slight inflation when the tolerance was not met
    double safe() const { return converged ? value : value * 1.01; }
};

// Largest eigenvalue of a symmetric PSD matrix by power iteration with a
// deterministic all-ones start vector. Convergence is certified through the
// eigenpair residual, which bounds the distance to a true eigenvalue.
inline SigmaResult sigma_max(const double* M, int r, int iters = 50, double tol = 1e-8) {
    std::vector<double> x(r, 1.0 / std::sqrt(double(r))), y(r);
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        for (int i = 0; i < r; ++i) {
            double acc = 0.0;
            const double* row = M + size_t(i) * r;
            for (int j = 0; j < r; ++j) acc += row[j] * x[j];
            y[i] = acc;
        }
        double ny = 0.0, rayleigh = 0.0;
        for (int i = 0; i < r; ++i) {
            ny += y[i] * y[i];
            rayleigh += x[i] * y[i];
        }
        ny = std::sqrt(ny);
        if (ny == 0.0) return {0.0, true};
        lambda = rayleigh;
        double resid = 0.0;
        for (int i = 0; i < r; ++i) {
            const double d = y[i] - rayleigh * x[i];
            resid += d * d;
        }
        if (std::sqrt(resid) <= tol * std::max(std::abs(rayleigh), 1e-300))
            return {rayleigh, true};
        for (int i = 0; i < r; ++i) x[i] = y[i] / ny;
    }
    return {lambda, false};
}

inline SigmaResult sigma_max(const DenseMatrix& M, int iters = 50, double tol = 1e-8) {
    if (M.m != M.n) throw DimensionMismatch("spectral estimate needs a square matrix");
    return sigma_max(M.data.data(), M.m, iters, tol);
}

namespace detail {

// in-place lower Cholesky; false on a nonpositive pivot
inline bool cholesky(std::vector<double>& L, int r) {
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j <= i; ++j) {
            double acc = L[size_t(i) * r + j];
            for (int k = 0; k < j; ++k) acc -= L[size_t(i) * r + k] * L[size_t(j) * r + k];
            if (i == j) {
                if (acc <= 0.0 || !std::isfinite(acc)) return false;
                L[size_t(i) * r + i] = std::sqrt(acc);
            } else {
                L[size_t(i) * r + j] = acc / L[size_t(j) * r + j];
            }
        }
        for (int j = i + 1; j < r; ++j) L[size_t(i) * r + j] = 0.0;
    }
    return true;
}

inline void cholesky_solve(const std::vector<double>& L, int r, const double* bcol, double* xcol,
                           int stride) {
    std::vector<double> tmp(r);
    for (int i = 0; i < r; ++i) {
        double acc = bcol[size_t(i) * stride];
        for (int k = 0; k < i; ++k) acc -= L[size_t(i) * r + k] * tmp[k];
        tmp[i] = acc / L[size_t(i) * r + i];
    }
    for (int i = r - 1; i >= 0; --i) {
        double acc = tmp[i];
        for (int k = i + 1; k < r; ++k) acc -= L[size_t(k) * r + i] * xcol[size_t(k) * stride];
        xcol[size_t(i) * stride] = acc / L[size_t(i) * r + i];
    }
}

}  // namespace detail

// Solves (G + delta*I) X = B for symmetric G via Cholesky. A failed factorization
// retries once with an extra 10*delta of regularization before giving up.
inline void spd_solve(const double* G, int r, double delta, const double* B, int k, double* X) {
    std::vector<double> L(size_t(r) * r);
    for (double bump : {0.0, 10.0 * delta}) {
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                L[size_t(i) * r + j] = G[size_t(i) * r + j] + (i == j ? delta + bump : 0.0);
        if (detail::cholesky(L, r)) {
            for (int col = 0; col < k; ++col)
                detail::cholesky_solve(L, r, B + col, X + col, k);
            return;
        }
    }
    throw NotPositiveDefinite("regularized system is not positive definite");
}

// Maps each length-r row of `rows` through (G + delta*I)^-1 in place, factoring
// once. Because the system matrix is symmetric this right-applies the inverse.
inline void spd_solve_rows(const double* G, int r, double delta, double* rows, int count) {
    std::vector<double> L(size_t(r) * r);
    bool ok = false;
    for (double bump : {0.0, 10.0 * delta}) {
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j)
                L[size_t(i) * r + j] = G[size_t(i) * r + j] + (i == j ? delta + bump : 0.0);
        if (detail::cholesky(L, r)) {
            ok = true;
            break;
        }
    }
    if (!ok) throw NotPositiveDefinite("regularized system is not positive definite");
    std::vector<double> x(r);
    for (int t = 0; t < count; ++t) {
        double* row = rows + size_t(t) * r;
        detail::cholesky_solve(L, r, row, x.data(), 1);
        for (int c = 0; c < r; ++c) row[c] = x[c];
    }
}

inline DenseMatrix spd_solve(const DenseMatrix& G, double delta, const DenseMatrix& B) {
    if (G.m != G.n || G.m != B.m)
        throw DimensionMismatch("solve needs square G conforming with B");
    DenseMatrix X(B.m, B.n);
    spd_solve(G.data.data(), G.m, delta, B.data.data(), B.n, X.data.data());
    return X;
}

// X^T X with the upper triangle computed once and mirrored, so the result is
// symmetric bitwise.
inline void gram(const double* X, int p, int r, double* G) {
    for (int c = 0; c < r; ++c)
        for (int d = c; d < r; ++d) {
            double acc = 0.0;
            for (int t = 0; t < p; ++t) acc += X[size_t(t) * r + c] * X[size_t(t) * r + d];
            G[size_t(c) * r + d] = acc;
            G[size_t(d) * r + c] = acc;
        }
}

inline DenseMatrix gram(const DenseMatrix& X) {
    DenseMatrix G(X.n, X.n);
    gram(X.data.data(), X.m, X.n, G.data.data());
    return G;
}

inline DenseMatrix hadamard(const DenseMatrix& M1, const DenseMatrix& M2) {
    if (M1.m != M2.m || M1.n != M2.n)
        throw DimensionMismatch("elementwise product needs equal shapes");
    DenseMatrix P(M1.m, M1.n);
    for (size_t i = 0; i < P.data.size(); ++i) P.data[i] = M1.data[i] * M2.data[i];
    return P;
}

}  // namespace blast
