#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "blast/blast.hpp"

namespace testutil {

inline blast::DenseMatrix random_dense(int m, int n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    blast::DenseMatrix D(m, n);
    for (double& x : D.data) x = gauss(rng);
    return D;
}

inline blast::BlastMatrix random_blast(int m, int n, int b, int r, std::mt19937_64& rng,
                                       double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    const int p = m / b, q = n / b;
    std::vector<double> U(size_t(b) * p * r), V(size_t(b) * q * r), S(size_t(b) * b * r);
    for (double& x : U) x = gauss(rng);
    for (double& x : V) x = gauss(rng);
    for (double& x : S) x = gauss(rng);
    return blast::new_blast(m, n, b, r, std::move(U), std::move(V), std::move(S));
}

inline double rel_frobenius(const blast::DenseMatrix& X, const blast::DenseMatrix& Y) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < X.data.size(); ++i) {
        const double d = X.data[i] - Y.data[i];
        num += d * d;
        den += Y.data[i] * Y.data[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double rel_inf(const std::vector<double>& x, const std::vector<double>& y) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        num = std::max(num, std::abs(x[i] - y[i]));
        den = std::max(den, std::abs(y[i]));
    }
    return den > 0.0 ? num / den : num;
}

// cyclic Jacobi sweeps; independent oracle for spectra of small symmetric matrices
inline std::vector<double> jacobi_eigenvalues(std::vector<double> M, int r) {
    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < r; ++p)
            for (int q = p + 1; q < r; ++q) off += M[size_t(p) * r + q] * M[size_t(p) * r + q];
        if (off < 1e-26) break;
        for (int p = 0; p < r; ++p)
            for (int q = p + 1; q < r; ++q) {
                const double apq = M[size_t(p) * r + q];
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (M[size_t(q) * r + q] - M[size_t(p) * r + p]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < r; ++k) {
                    const double mkp = M[size_t(k) * r + p];
                    const double mkq = M[size_t(k) * r + q];
                    M[size_t(k) * r + p] = c * mkp - s * mkq;
                    M[size_t(k) * r + q] = s * mkp + c * mkq;
                }
                for (int k = 0; k < r; ++k) {
                    const double mpk = M[size_t(p) * r + k];
                    const double mqk = M[size_t(q) * r + k];
                    M[size_t(p) * r + k] = c * mpk - s * mqk;
                    M[size_t(q) * r + k] = s * mpk + c * mqk;
                }
            }
    }
    std::vector<double> eig(r);
    for (int i = 0; i < r; ++i) eig[i] = M[size_t(i) * r + i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

// block-by-block reconstruction with loop orders unlike the library's
inline blast::DenseMatrix naive_dense(const blast::BlastMatrix& A) {
    const int b = A.b, r = A.r, p = A.p(), q = A.q();
    blast::DenseMatrix D(A.m, A.n);
    for (int i = 0; i < b; ++i)
        for (int j = 0; j < b; ++j)
            for (int c = 0; c < r; ++c) {
                const double* Ui = A.U_block(i);
                const double* Vj = A.V_block(j);
                const double s = A.s_vec(i, j)[c];
                for (int u = 0; u < q; ++u)
                    for (int t = 0; t < p; ++t)
                        D(i * p + t, j * q + u) += Ui[size_t(t) * r + c] * s * Vj[size_t(u) * r + c];
            }
    return D;
}

}  // namespace testutil
