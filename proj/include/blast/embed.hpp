#pragma once

#include <string>
#include <utility>
#include <vector>

#include "blast/blast_matrix.hpp"
#include "blast/dense.hpp"
#include "blast/errors.hpp"

namespace blast {

// Global low-rank product Uf * Vf^T as a block-partitioned matrix: factors are
// chunked row-wise and every coupling vector is all ones.
inline BlastMatrix low_rank_embed(const DenseMatrix& Uf, const DenseMatrix& Vf, int b) {
    const int m = Uf.m, n = Vf.m, r = Uf.n;
    if (r < 1) throw DimensionMismatch("factor rank must be positive");
    if (Vf.n != r)
        throw DimensionMismatch("left and right factors must share the same column count");
    if (b <= 0 || m % b != 0 || n % b != 0)
        throw DimensionMismatch("block count must divide both factor row counts");
    std::vector<double> S(size_t(b) * b * r, 1.0);
    return new_blast(m, n, b, r, Uf.data, Vf.data, std::move(S));
}

// Square diagonal blocks stored verbatim: U_i carries the block, V_i the identity,
// couplings select the diagonal so off-diagonal blocks are exactly zero.
inline BlastMatrix block_diagonal_embed(const std::vector<DenseMatrix>& blocks) {
    const int b = int(blocks.size());
    if (b == 0) throw DimensionMismatch("need at least one diagonal block");
    const int p = blocks[0].m;
    for (const auto& blk : blocks)
        if (blk.m != p || blk.n != p)
            throw DimensionMismatch("diagonal blocks must all be square with equal size");
    const int r = p;
    std::vector<double> U, V(size_t(b) * p * r, 0.0), S(size_t(b) * b * r, 0.0);
    U.reserve(size_t(b) * p * r);
    for (const auto& blk : blocks) U.insert(U.end(), blk.data.begin(), blk.data.end());
    for (int i = 0; i < b; ++i) {
        double* Vi = V.data() + size_t(i) * p * r;
        for (int t = 0; t < p; ++t) Vi[size_t(t) * r + t] = 1.0;
        double* sii = S.data() + (size_t(i) * b + i) * r;
        for (int c = 0; c < r; ++c) sii[c] = 1.0;
    }
    return new_blast(b * p, b * p, b, r, std::move(U), std::move(V), std::move(S));
}

// Rank-limited variant: caller supplies per-block factor pairs with block_i = L_i * R_i^T.
inline BlastMatrix block_diagonal_embed(
    const std::vector<std::pair<DenseMatrix, DenseMatrix>>& factor_pairs, int r) {
    const int b = int(factor_pairs.size());
    if (b == 0) throw DimensionMismatch("need at least one diagonal block");
    if (r < 1) throw DimensionMismatch("rank must be positive");
    const int p = factor_pairs[0].first.m;
    for (const auto& [L, R] : factor_pairs) {
        if (L.m != p || R.m != p)
            throw DimensionMismatch("diagonal block factors must all have equal row count");
        if (L.n != r || R.n != r)
            throw RankMismatch("all diagonal block factors must have rank " + std::to_string(r));
    }
    std::vector<double> U, V, S(size_t(b) * b * r, 0.0);
    U.reserve(size_t(b) * p * r);
    V.reserve(size_t(b) * p * r);
    for (const auto& [L, R] : factor_pairs) {
        U.insert(U.end(), L.data.begin(), L.data.end());
        V.insert(V.end(), R.data.begin(), R.data.end());
    }
    for (int i = 0; i < b; ++i) {
        double* sii = S.data() + (size_t(i) * b + i) * r;
        for (int c = 0; c < r; ++c) sii[c] = 1.0;
    }
    return new_blast(b * p, b * p, b, r, std::move(U), std::move(V), std::move(S));
}

// Block low-rank grid with uniform per-block rank t, embedded at r = b*t.
// Chunk c of the shared row factor U_i holds the grid block at column (c-i) mod b,
// chunk c of V_j holds the grid block at row (c-j) mod b, and s_ij turns on
// chunk (i+j) mod b, which lines both up so block (i,j) reproduces L_ij * R_ij^T.
inline BlastMatrix blr_embed(
    const std::vector<std::vector<std::pair<DenseMatrix, DenseMatrix>>>& blocks_uv) {
    const int b = int(blocks_uv.size());
    if (b == 0) throw DimensionMismatch("need a nonempty block grid");
    for (const auto& row : blocks_uv)
        if (int(row.size()) != b) throw DimensionMismatch("block grid must be square");
    const int p = blocks_uv[0][0].first.m;
    const int q = blocks_uv[0][0].second.m;
    const int t = blocks_uv[0][0].first.n;
    if (t < 1) throw RankMismatch("per-block rank must be positive");
    for (const auto& row : blocks_uv)
        for (const auto& [L, R] : row) {
            if (L.n != t || R.n != t)
                throw RankMismatch("per-block ranks must all equal " + std::to_string(t));
            if (L.m != p || R.m != q)
                throw DimensionMismatch("grid blocks must share one block shape");
        }
    const int r = b * t;
    std::vector<double> U(size_t(b) * p * r, 0.0);
    std::vector<double> V(size_t(b) * q * r, 0.0);
    std::vector<double> S(size_t(b) * b * r, 0.0);
    for (int i = 0; i < b; ++i) {
        double* Ui = U.data() + size_t(i) * p * r;
        for (int c = 0; c < b; ++c) {
            const DenseMatrix& L = blocks_uv[i][(c - i + b) % b].first;
            for (int row = 0; row < p; ++row)
                for (int col = 0; col < t; ++col)
                    Ui[size_t(row) * r + c * t + col] = L(row, col);
        }
    }
    for (int j = 0; j < b; ++j) {
        double* Vj = V.data() + size_t(j) * q * r;
        for (int c = 0; c < b; ++c) {
            const DenseMatrix& R = blocks_uv[(c - j + b) % b][j].second;
            for (int row = 0; row < q; ++row)
                for (int col = 0; col < t; ++col)
                    Vj[size_t(row) * r + c * t + col] = R(row, col);
        }
    }
    for (int i = 0; i < b; ++i)
        for (int j = 0; j < b; ++j) {
            double* sij = S.data() + (size_t(i) * b + j) * r;
            const int hot = (i + j) % b;
            for (int col = 0; col < t; ++col) sij[hot * t + col] = 1.0;
        }
    return new_blast(b * p, b * q, b, r, std::move(U), std::move(V), std::move(S));
}

}  // namespace blast
