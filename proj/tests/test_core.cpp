#include <catch2/catch_amalgamated.hpp>

#include <limits>
#include <random>

#include "blast/blast.hpp"
#include "helpers.hpp"

using namespace blast;

TEST_CASE("construction validates shapes and content") {
    SECTION("zero factors give the zero matrix") {
        const int m = 256, n = 256, b = 16, r = 8;
        BlastMatrix A = new_blast(m, n, b, r, std::vector<double>(size_t(b) * (m / b) * r, 0.0),
                                  std::vector<double>(size_t(b) * (n / b) * r, 0.0),
                                  std::vector<double>(size_t(b) * b * r, 0.0));
        DenseMatrix D = to_dense(A);
        for (double v : D.data) REQUIRE(v == 0.0);
    }
    SECTION("large rectangular shape with rank above block size is valid") {
        std::mt19937_64 rng(7);
        REQUIRE_NOTHROW(testutil::random_blast(3456, 1152, 9, 384, rng));
    }
    SECTION("block count must divide dimensions") {
        REQUIRE_THROWS_AS(new_blast(10, 10, 3, 2, {}, {}, {}), DimensionMismatch);
    }
    SECTION("wrong factor sizes are rejected") {
        REQUIRE_THROWS_AS(new_blast(8, 8, 2, 2, std::vector<double>(5, 0.0),
                                    std::vector<double>(16, 0.0), std::vector<double>(8, 0.0)),
                          DimensionMismatch);
    }
    SECTION("non-finite entries are rejected") {
        std::vector<double> U(16, 0.0), V(16, 0.0), S(8, 0.0);
        U[3] = std::numeric_limits<double>::quiet_NaN();
        REQUIRE_THROWS_AS(new_blast(8, 8, 2, 2, U, V, S), NonFiniteInput);
    }
}

TEST_CASE("parameter and multiply counts") {
    std::mt19937_64 rng(11);
    SECTION("square reference shape") {
        BlastMatrix A = testutil::random_blast(256, 256, 16, 8, rng);
        REQUIRE(param_count(A) == 6144);
        REQUIRE(matvec_flops(A) == 6144);
        REQUIRE(compression_ratio(A) == Catch::Approx(0.90625).epsilon(1e-15));
    }
    SECTION("single block") {
        BlastMatrix A = testutil::random_blast(256, 256, 1, 8, rng);
        REQUIRE(param_count(A) == 4104);
        REQUIRE(matvec_flops(A) == 4104);
    }
    SECTION("rectangular shape matches the stored element count") {
        BlastMatrix A = testutil::random_blast(3456, 1152, 9, 384, rng);
        REQUIRE(param_count(A) == 1800576);
        REQUIRE(std::int64_t(A.U.size() + A.V.size() + A.S.size()) == param_count(A));
    }
    SECTION("count equals stored scalars across random shapes") {
        for (int trial = 0; trial < 10; ++trial) {
            std::uniform_int_distribution<int> pick_b(1, 4), pick_pq(1, 5), pick_r(1, 6);
            const int b = pick_b(rng), p = pick_pq(rng), q = pick_pq(rng), r = pick_r(rng);
            BlastMatrix A = testutil::random_blast(b * p, b * q, b, r, rng);
            REQUIRE(std::int64_t(A.U.size() + A.V.size() + A.S.size()) == param_count(A));
            REQUIRE(matvec_flops(A) == param_count(A));
        }
    }
}

TEST_CASE("low rank embedding") {
    SECTION("rank one all-ones") {
        DenseMatrix Uf(4, 1, std::vector<double>(4, 1.0));
        DenseMatrix Vf(4, 1, std::vector<double>(4, 1.0));
        BlastMatrix A = low_rank_embed(Uf, Vf, 2);
        DenseMatrix D = to_dense(A);
        for (double v : D.data) REQUIRE(v == Catch::Approx(1.0).margin(1e-15));
    }
    SECTION("random factors reproduce the outer product") {
        std::mt19937_64 rng(23);
        DenseMatrix Uf = testutil::random_dense(256, 8, rng);
        DenseMatrix Vf = testutil::random_dense(256, 8, rng);
        BlastMatrix A = low_rank_embed(Uf, Vf, 16);
        DenseMatrix want(256, 256);
        for (int i = 0; i < 256; ++i)
            for (int j = 0; j < 256; ++j) {
                double acc = 0.0;
                for (int c = 0; c < 8; ++c) acc += Uf(i, c) * Vf(j, c);
                want(i, j) = acc;
            }
        REQUIRE(testutil::rel_frobenius(to_dense(A), want) <= 1e-12);
    }
    SECTION("zero-rank factors are rejected") {
        REQUIRE_THROWS_AS(low_rank_embed(DenseMatrix(4, 1), DenseMatrix(4, 2), 2),
                          DimensionMismatch);
    }
}

TEST_CASE("block diagonal embedding") {
    SECTION("identity blocks give the identity") {
        DenseMatrix I2(2, 2);
        I2(0, 0) = I2(1, 1) = 1.0;
        BlastMatrix A = block_diagonal_embed({I2, I2});
        DenseMatrix D = to_dense(A);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) REQUIRE(D(i, j) == (i == j ? 1.0 : 0.0));
    }
    SECTION("off-diagonal blocks are exactly zero") {
        std::mt19937_64 rng(31);
        std::vector<DenseMatrix> blocks;
        for (int i = 0; i < 3; ++i) blocks.push_back(testutil::random_dense(4, 4, rng));
        BlastMatrix A = block_diagonal_embed(blocks);
        DenseMatrix D = to_dense(A);
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j) {
                if (i / 4 == j / 4)
                    REQUIRE(D(i, j) == Catch::Approx(blocks[i / 4](i % 4, j % 4)).margin(1e-12));
                else
                    REQUIRE(D(i, j) == 0.0);
            }
    }
    SECTION("supplied factor pairs reproduce their products") {
        std::mt19937_64 rng(37);
        std::vector<std::pair<DenseMatrix, DenseMatrix>> pairs;
        for (int i = 0; i < 3; ++i)
            pairs.emplace_back(testutil::random_dense(5, 2, rng), testutil::random_dense(5, 2, rng));
        BlastMatrix A = block_diagonal_embed(pairs, 2);
        DenseMatrix D = to_dense(A);
        for (int blk = 0; blk < 3; ++blk)
            for (int t = 0; t < 5; ++t)
                for (int u = 0; u < 5; ++u) {
                    double want = 0.0;
                    for (int c = 0; c < 2; ++c)
                        want += pairs[blk].first(t, c) * pairs[blk].second(u, c);
                    REQUIRE(D(blk * 5 + t, blk * 5 + u) == Catch::Approx(want).margin(1e-12));
                }
        for (int i = 0; i < 15; ++i)
            for (int j = 0; j < 15; ++j)
                if (i / 5 != j / 5) REQUIRE(D(i, j) == 0.0);
    }
    SECTION("mismatched ranks are rejected") {
        std::mt19937_64 rng(41);
        std::vector<std::pair<DenseMatrix, DenseMatrix>> pairs;
        pairs.emplace_back(testutil::random_dense(4, 2, rng), testutil::random_dense(4, 2, rng));
        pairs.emplace_back(testutil::random_dense(4, 3, rng), testutil::random_dense(4, 3, rng));
        REQUIRE_THROWS_AS(block_diagonal_embed(pairs, 2), RankMismatch);
    }
}

TEST_CASE("block low rank embedding") {
    SECTION("basis-vector blocks") {
        DenseMatrix e1(2, 1);
        e1(0, 0) = 1.0;
        std::vector<std::vector<std::pair<DenseMatrix, DenseMatrix>>> grid(
            3, std::vector<std::pair<DenseMatrix, DenseMatrix>>(3, {e1, e1}));
        BlastMatrix A = blr_embed(grid);
        REQUIRE(A.r == 3);
        DenseMatrix D = to_dense(A);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                REQUIRE(D(i, j) == Catch::Approx(i % 2 == 0 && j % 2 == 0 ? 1.0 : 0.0).margin(1e-15));
    }
    SECTION("random grid reproduces every block product") {
        std::mt19937_64 rng(43);
        const int b = 3, t = 2, p = 4, q = 4;
        std::vector<std::vector<std::pair<DenseMatrix, DenseMatrix>>> grid;
        for (int i = 0; i < b; ++i) {
            grid.emplace_back();
            for (int j = 0; j < b; ++j)
                grid[i].emplace_back(testutil::random_dense(p, t, rng),
                                     testutil::random_dense(q, t, rng));
        }
        BlastMatrix A = blr_embed(grid);
        REQUIRE(A.r == b * t);
        DenseMatrix D = to_dense(A);
        for (int i = 0; i < b; ++i)
            for (int j = 0; j < b; ++j) {
                DenseMatrix got(p, q), want(p, q);
                for (int tt = 0; tt < p; ++tt)
                    for (int u = 0; u < q; ++u) {
                        got(tt, u) = D(i * p + tt, j * q + u);
                        double acc = 0.0;
                        for (int c = 0; c < t; ++c)
                            acc += grid[i][j].first(tt, c) * grid[i][j].second(u, c);
                        want(tt, u) = acc;
                    }
                REQUIRE(testutil::rel_frobenius(got, want) <= 1e-12);
            }
    }
    SECTION("parameter overhead relative to raw per-block factors") {
        std::mt19937_64 rng(47);
        const int b = 3, t = 2, p = 4, q = 4;
        std::vector<std::vector<std::pair<DenseMatrix, DenseMatrix>>> grid;
        for (int i = 0; i < b; ++i) {
            grid.emplace_back();
            for (int j = 0; j < b; ++j)
                grid[i].emplace_back(testutil::random_dense(p, t, rng),
                                     testutil::random_dense(q, t, rng));
        }
        BlastMatrix A = blr_embed(grid);
        const std::int64_t raw = std::int64_t(b) * b * (p + q) * t;
        REQUIRE(param_count(A) - raw == std::int64_t(A.r) * b * b);
        REQUIRE(param_count(A) == std::int64_t(A.m + A.n) * A.r + std::int64_t(A.r) * b * b);
    }
    SECTION("ragged ranks are rejected") {
        std::mt19937_64 rng(53);
        std::vector<std::vector<std::pair<DenseMatrix, DenseMatrix>>> grid(
            2, std::vector<std::pair<DenseMatrix, DenseMatrix>>(
                   2, {testutil::random_dense(3, 1, rng), testutil::random_dense(3, 1, rng)}));
        grid[1][1] = {testutil::random_dense(3, 2, rng), testutil::random_dense(3, 2, rng)};
        REQUIRE_THROWS_AS(blr_embed(grid), RankMismatch);
    }
}
