#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "blast/blast_matrix.hpp"
#include "blast/dense.hpp"
#include "blast/errors.hpp"
#include "blast/linalg.hpp"

namespace blast {

struct StepSchedule {
    enum class Kind { linear_decay, constant, theorem1 };
    Kind kind = Kind::linear_decay;
    double eta_start = 1.0;
    double eta_end = 0.0;

    static StepSchedule linear(double start, double end) {
        return {Kind::linear_decay, start, end};
    }
    static StepSchedule fixed(double eta) { return {Kind::constant, eta, eta}; }
    static StepSchedule safe_bounds() { return {Kind::theorem1, 1.0, 1.0}; }

    double value_at(int k, int K) const {
        switch (kind) {
            case Kind::linear_decay:
                return eta_start + (eta_end - eta_start) * (double(k) / double(K));
            case Kind::constant:
                return eta_start;
            default:
                return 1.0;
        }
    }
};

enum class Method { gd, precgd };

struct FactorizeConfig {
    int b = 16;
    int r = 8;
    int K = 300;
    double epsilon = 1e-2;
    double delta0 = 0.1;
    double delta_floor = 1e-12;
    StepSchedule schedule = StepSchedule::linear(1.0, 0.0);
    std::uint64_t seed = 0;
    Method method = Method::precgd;
};

struct HistoryEntry {
    int iteration;
    double loss;
    double rel_err;  // NaN when the target has zero norm
    double seconds;
};

struct FactorizeReport {
    BlastMatrix factors;
    std::vector<HistoryEntry> history;  // K+1 entries, iteration 0 first
};

// reciprocal spectral-norm step bounds per factor group; infinite entries mark
// zero Gram matrices (degenerate factors) and are safe to treat as no-ops
struct StepSizes {
    std::vector<double> eta_U;  // b
    std::vector<double> eta_V;  // b
    std::vector<double> eta_S;  // b*b, row-major (i,j)
    bool degenerate = false;
};

inline double delta_rule(double loss_value, double delta0, double delta_floor) {
    return std::max(delta0 * std::sqrt(loss_value), delta_floor);
}

inline double block_loss(const DenseMatrix& A, const BlastMatrix& F, int i, int j) {
    const int p = F.p(), q = F.q(), r = F.r;
    const double* Ui = F.U_block(i);
    const double* Vj = F.V_block(j);
    const double* sij = F.s_vec(i, j);
    double acc = 0.0;
    for (int t = 0; t < p; ++t) {
        const double* arow = A.row(i * p + t) + size_t(j) * q;
        const double* Uit = Ui + size_t(t) * r;
        for (int u = 0; u < q; ++u) {
            const double* Vju = Vj + size_t(u) * r;
            double pred = 0.0;
            for (int c = 0; c < r; ++c) pred += Uit[c] * sij[c] * Vju[c];
            const double res = arow[u] - pred;
            acc += res * res;
        }
    }
    return 0.5 * acc;
}

inline double block_row_loss(const DenseMatrix& A, const BlastMatrix& F, int i) {
    double acc = 0.0;
    for (int j = 0; j < F.b; ++j) acc += block_loss(A, F, i, j);
    return acc;
}

inline double block_col_loss(const DenseMatrix& A, const BlastMatrix& F, int j) {
    double acc = 0.0;
    for (int i = 0; i < F.b; ++i) acc += block_loss(A, F, i, j);
    return acc;
}

// half the squared Frobenius residual, accumulated block by block
inline double loss(const DenseMatrix& A, const BlastMatrix& F) {
    if (A.m != F.m || A.n != F.n)
        throw DimensionMismatch("target and factored shapes must agree");
    double acc = 0.0;
    for (int i = 0; i < F.b; ++i) acc += block_row_loss(A, F, i);
    return acc;
}

namespace detail {

// Gram of the coupling-scaled right factors along block-row i:
// G = sum_j (s_ij s_ij^T) ⊙ (V_j^T V_j), with VG holding each V_j^T V_j.
inline void row_gram(const BlastMatrix& F, int i, const std::vector<double>& VG, double* G) {
    const int b = F.b, r = F.r;
    std::fill(G, G + size_t(r) * r, 0.0);
    for (int j = 0; j < b; ++j) {
        const double* sij = F.s_vec(i, j);
        const double* VGj = VG.data() + size_t(j) * r * r;
        for (int c = 0; c < r; ++c)
            for (int d = 0; d < r; ++d)
                G[size_t(c) * r + d] += sij[c] * sij[d] * VGj[size_t(c) * r + d];
    }
}

// same along block-column j with UG holding each U_i^T U_i
inline void col_gram(const BlastMatrix& F, int j, const std::vector<double>& UG, double* G) {
    const int b = F.b, r = F.r;
    std::fill(G, G + size_t(r) * r, 0.0);
    for (int i = 0; i < b; ++i) {
        const double* sij = F.s_vec(i, j);
        const double* UGi = UG.data() + size_t(i) * r * r;
        for (int c = 0; c < r; ++c)
            for (int d = 0; d < r; ++d)
                G[size_t(c) * r + d] += sij[c] * sij[d] * UGi[size_t(c) * r + d];
    }
}

inline std::vector<double> left_grams(const BlastMatrix& F) {
    std::vector<double> UG(size_t(F.b) * F.r * F.r);
    for (int i = 0; i < F.b; ++i) gram(F.U_block(i), F.p(), F.r, UG.data() + size_t(i) * F.r * F.r);
    return UG;
}

inline std::vector<double> right_grams(const BlastMatrix& F) {
    std::vector<double> VG(size_t(F.b) * F.r * F.r);
    for (int j = 0; j < F.b; ++j) gram(F.V_block(j), F.q(), F.r, VG.data() + size_t(j) * F.r * F.r);
    return VG;
}

// grad wrt U_i given the row Gram G: U_i G - sum_j A_ij (V_j diag(s_ij))
inline void u_gradient(const DenseMatrix& A, const BlastMatrix& F, int i, const double* G,
                       double* grad) {
    const int b = F.b, p = F.p(), q = F.q(), r = F.r;
    const double* Ui = F.U_block(i);
    for (int t = 0; t < p; ++t) {
        const double* Uit = Ui + size_t(t) * r;
        double* gt = grad + size_t(t) * r;
        for (int c = 0; c < r; ++c) {
            double acc = 0.0;
            for (int d = 0; d < r; ++d) acc += Uit[d] * G[size_t(d) * r + c];
            gt[c] = acc;
        }
    }
    std::vector<double> SV(size_t(q) * r);
    for (int j = 0; j < b; ++j) {
        const double* Vj = F.V_block(j);
        const double* sij = F.s_vec(i, j);
        for (int u = 0; u < q; ++u)
            for (int c = 0; c < r; ++c) SV[size_t(u) * r + c] = Vj[size_t(u) * r + c] * sij[c];
        for (int t = 0; t < p; ++t) {
            const double* arow = A.row(i * p + t) + size_t(j) * q;
            double* gt = grad + size_t(t) * r;
            for (int u = 0; u < q; ++u) {
                const double a = arow[u];
                const double* SVu = SV.data() + size_t(u) * r;
                for (int c = 0; c < r; ++c) gt[c] -= a * SVu[c];
            }
        }
    }
}

// grad wrt V_j given the column Gram G: V_j G - sum_i A_ij^T (U_i diag(s_ij))
inline void v_gradient(const DenseMatrix& A, const BlastMatrix& F, int j, const double* G,
                       double* grad) {
    const int b = F.b, p = F.p(), q = F.q(), r = F.r;
    const double* Vj = F.V_block(j);
    for (int u = 0; u < q; ++u) {
        const double* Vju = Vj + size_t(u) * r;
        double* gu = grad + size_t(u) * r;
        for (int c = 0; c < r; ++c) {
            double acc = 0.0;
            for (int d = 0; d < r; ++d) acc += Vju[d] * G[size_t(d) * r + c];
            gu[c] = acc;
        }
    }
    std::vector<double> SU(size_t(p) * r);
    for (int i = 0; i < b; ++i) {
        const double* Ui = F.U_block(i);
        const double* sij = F.s_vec(i, j);
        for (int t = 0; t < p; ++t)
            for (int c = 0; c < r; ++c) SU[size_t(t) * r + c] = Ui[size_t(t) * r + c] * sij[c];
        for (int t = 0; t < p; ++t) {
            const double* acol = A.row(i * p + t) + size_t(j) * q;
            const double* SUt = SU.data() + size_t(t) * r;
            for (int u = 0; u < q; ++u) {
                const double a = acol[u];
                double* gu = grad + size_t(u) * r;
                for (int c = 0; c < r; ++c) gu[c] -= a * SUt[c];
            }
        }
    }
}

// grad wrt s_ij: W s - diag(U_i^T A_ij V_j) with W = (U_i^T U_i) ⊙ (V_j^T V_j)
inline void s_gradient(const DenseMatrix& A, const BlastMatrix& F, int i, int j, const double* W,
                       double* grad) {
    const int p = F.p(), q = F.q(), r = F.r;
    const double* Ui = F.U_block(i);
    const double* Vj = F.V_block(j);
    const double* sij = F.s_vec(i, j);
    for (int c = 0; c < r; ++c) {
        double acc = 0.0;
        for (int d = 0; d < r; ++d) acc += W[size_t(c) * r + d] * sij[d];
        grad[c] = acc;
    }
    std::vector<double> av(r);
    for (int t = 0; t < p; ++t) {
        const double* arow = A.row(i * p + t) + size_t(j) * q;
        std::fill(av.begin(), av.end(), 0.0);
        for (int u = 0; u < q; ++u) {
            const double a = arow[u];
            const double* Vju = Vj + size_t(u) * r;
            for (int c = 0; c < r; ++c) av[c] += a * Vju[c];
        }
        const double* Uit = Ui + size_t(t) * r;
        for (int c = 0; c < r; ++c) grad[c] -= Uit[c] * av[c];
    }
}

inline void hadamard_rr(const double* M1, const double* M2, int r, double* out) {
    for (size_t i = 0; i < size_t(r) * r; ++i) out[i] = M1[i] * M2[i];
}

enum class SweepMode { scaled, fixed, prec };

struct SweepParams {
    SweepMode mode = SweepMode::scaled;
    double eta = 1.0;  // bound multiplier (scaled) or raw step size (prec)
    const StepSizes* fixed = nullptr;
    double delta0 = 0.1;
    double delta_floor = 1e-12;
};

// One alternating pass: all U_i, then all V_j against the updated U, then all
// s_ij against the updated U and V. Safe bounds and preconditioner shifts are
// recomputed fresh at each phase from the factors that phase actually sees.
inline void alternating_sweep(const DenseMatrix& A, BlastMatrix& F, const SweepParams& sp) {
    const int b = F.b, p = F.p(), q = F.q(), r = F.r;
    std::vector<double> G(size_t(r) * r), grad(size_t(std::max(p, q)) * r);

    std::vector<double> VG = right_grams(F);
    for (int i = 0; i < b; ++i) {
        row_gram(F, i, VG, G.data());
        u_gradient(A, F, i, G.data(), grad.data());
        double step;
        if (sp.mode == SweepMode::prec) {
            const double delta = delta_rule(block_row_loss(A, F, i), sp.delta0, sp.delta_floor);
            spd_solve_rows(G.data(), r, delta, grad.data(), p);
            step = sp.eta;
        } else if (sp.mode == SweepMode::fixed) {
            step = sp.fixed->eta_U[i];
            if (!std::isfinite(step)) continue;
        } else {
            const double s1 = sigma_max(G.data(), r).safe();
            if (s1 <= 0.0) continue;
            step = sp.eta / s1;
        }
        double* Ui = F.U_block(i);
        for (size_t t = 0; t < size_t(p) * r; ++t) Ui[t] -= step * grad[t];
    }

    std::vector<double> UG = left_grams(F);
    for (int j = 0; j < b; ++j) {
        col_gram(F, j, UG, G.data());
        v_gradient(A, F, j, G.data(), grad.data());
        double step;
        if (sp.mode == SweepMode::prec) {
            const double delta = delta_rule(block_col_loss(A, F, j), sp.delta0, sp.delta_floor);
            spd_solve_rows(G.data(), r, delta, grad.data(), q);
            step = sp.eta;
        } else if (sp.mode == SweepMode::fixed) {
            step = sp.fixed->eta_V[j];
            if (!std::isfinite(step)) continue;
        } else {
            const double s1 = sigma_max(G.data(), r).safe();
            if (s1 <= 0.0) continue;
            step = sp.eta / s1;
        }
        double* Vj = F.V_block(j);
        for (size_t u = 0; u < size_t(q) * r; ++u) Vj[u] -= step * grad[u];
    }

    VG = right_grams(F);
    UG = left_grams(F);
    std::vector<double> W(size_t(r) * r), sgrad(r), ssol(r);
    for (int i = 0; i < b; ++i) {
        for (int j = 0; j < b; ++j) {
            hadamard_rr(UG.data() + size_t(i) * r * r, VG.data() + size_t(j) * r * r, r, W.data());
            s_gradient(A, F, i, j, W.data(), sgrad.data());
            double step;
            if (sp.mode == SweepMode::prec) {
                const double delta = delta_rule(block_loss(A, F, i, j), sp.delta0, sp.delta_floor);
                spd_solve_rows(W.data(), r, delta, sgrad.data(), 1);
                step = sp.eta;
            } else if (sp.mode == SweepMode::fixed) {
                step = sp.fixed->eta_S[size_t(i) * b + j];
                if (!std::isfinite(step)) continue;
            } else {
                const double s1 = sigma_max(W.data(), r).safe();
                if (s1 <= 0.0) continue;
                step = sp.eta / s1;
            }
            double* sij = F.s_vec(i, j);
            for (int c = 0; c < r; ++c) sij[c] -= step * sgrad[c];
        }
    }
}

}  // namespace detail

inline DenseMatrix grad_U(const DenseMatrix& A, const BlastMatrix& F, int i) {
    std::vector<double> VG = detail::right_grams(F);
    std::vector<double> G(size_t(F.r) * F.r);
    detail::row_gram(F, i, VG, G.data());
    DenseMatrix out(F.p(), F.r);
    detail::u_gradient(A, F, i, G.data(), out.data.data());
    return out;
}

inline DenseMatrix grad_V(const DenseMatrix& A, const BlastMatrix& F, int j) {
    std::vector<double> UG = detail::left_grams(F);
    std::vector<double> G(size_t(F.r) * F.r);
    detail::col_gram(F, j, UG, G.data());
    DenseMatrix out(F.q(), F.r);
    detail::v_gradient(A, F, j, G.data(), out.data.data());
    return out;
}

inline std::vector<double> grad_s(const DenseMatrix& A, const BlastMatrix& F, int i, int j) {
    std::vector<double> GU(size_t(F.r) * F.r), GV(size_t(F.r) * F.r), W(size_t(F.r) * F.r);
    gram(F.U_block(i), F.p(), F.r, GU.data());
    gram(F.V_block(j), F.q(), F.r, GV.data());
    detail::hadamard_rr(GU.data(), GV.data(), F.r, W.data());
    std::vector<double> out(F.r);
    detail::s_gradient(A, F, i, j, W.data(), out.data());
    return out;
}

// Safe step bounds from one factor snapshot: the reciprocal largest eigenvalue
// of each phase's Gram matrix. Zero Grams yield infinite entries and set the
// degenerate flag; their gradients vanish identically, so callers may skip them.
inline StepSizes theorem1_step_sizes(const BlastMatrix& F) {
    const int b = F.b, r = F.r;
    StepSizes out;
    out.eta_U.resize(b);
    out.eta_V.resize(b);
    out.eta_S.resize(size_t(b) * b);
    std::vector<double> VG = detail::right_grams(F);
    std::vector<double> UG = detail::left_grams(F);
    std::vector<double> G(size_t(r) * r), W(size_t(r) * r);
    auto bound = [&](const double* M) {
        const double s1 = sigma_max(M, r).safe();
        if (s1 <= 0.0) {
            out.degenerate = true;
            return std::numeric_limits<double>::infinity();
        }
        return 1.0 / s1;
    };
    for (int i = 0; i < b; ++i) {
        detail::row_gram(F, i, VG, G.data());
        out.eta_U[i] = bound(G.data());
    }
    for (int j = 0; j < b; ++j) {
        detail::col_gram(F, j, UG, G.data());
        out.eta_V[j] = bound(G.data());
    }
    for (int i = 0; i < b; ++i)
        for (int j = 0; j < b; ++j) {
            detail::hadamard_rr(UG.data() + size_t(i) * r * r, VG.data() + size_t(j) * r * r, r,
                                W.data());
            out.eta_S[size_t(i) * b + j] = bound(W.data());
        }
    return out;
}

// One alternating sweep with caller-fixed step sizes.
inline BlastMatrix gd_step(const DenseMatrix& A, const BlastMatrix& F, const StepSizes& etas) {
    if (int(etas.eta_U.size()) != F.b || int(etas.eta_V.size()) != F.b ||
        etas.eta_S.size() != size_t(F.b) * F.b)
        throw DimensionMismatch("step-size table does not match the block grid");
    BlastMatrix out = F;
    detail::SweepParams sp;
    sp.mode = detail::SweepMode::fixed;
    sp.fixed = &etas;
    detail::alternating_sweep(A, out, sp);
    if (!out.all_finite()) throw NonFiniteUpdate("non-finite factor entry", 0);
    return out;
}

// One alternating sweep where each phase takes its own safe bound, recomputed
// from the factors that phase sees, scaled by eta_scale.
inline BlastMatrix gd_step(const DenseMatrix& A, const BlastMatrix& F, double eta_scale) {
    BlastMatrix out = F;
    detail::SweepParams sp;
    sp.mode = detail::SweepMode::scaled;
    sp.eta = eta_scale;
    detail::alternating_sweep(A, out, sp);
    if (!out.all_finite()) throw NonFiniteUpdate("non-finite factor entry", 0);
    return out;
}

// One preconditioned sweep: gradients pass through the regularized inverse Gram
// of their own phase, with the shift set from that subproblem's residual.
inline BlastMatrix precgd_step(const DenseMatrix& A, const BlastMatrix& F, double eta,
                               double delta0, double delta_floor) {
    BlastMatrix out = F;
    detail::SweepParams sp;
    sp.mode = detail::SweepMode::prec;
    sp.eta = eta;
    sp.delta0 = delta0;
    sp.delta_floor = delta_floor;
    detail::alternating_sweep(A, out, sp);
    if (!out.all_finite()) throw NonFiniteUpdate("non-finite factor entry", 0);
    return out;
}

// Explicit regularized inverse Gram matrices, for verification; the update path
// always goes through linear solves instead.
struct PreconditionerSet {
    std::vector<DenseMatrix> P_U;  // b matrices r x r
    std::vector<DenseMatrix> P_V;  // b matrices r x r
    std::vector<DenseMatrix> P_S;  // b*b matrices r x r, row-major (i,j)
};

inline PreconditionerSet precondition_matrices(const BlastMatrix& F, double delta) {
    if (delta <= 0.0) throw std::invalid_argument("regularization shift must be positive");
    const int b = F.b, r = F.r;
    std::vector<double> VG = detail::right_grams(F);
    std::vector<double> UG = detail::left_grams(F);
    DenseMatrix I(r, r);
    for (int c = 0; c < r; ++c) I(c, c) = 1.0;
    PreconditionerSet out;
    DenseMatrix G(r, r);
    for (int i = 0; i < b; ++i) {
        detail::row_gram(F, i, VG, G.data.data());
        out.P_U.push_back(spd_solve(G, delta, I));
    }
    for (int j = 0; j < b; ++j) {
        detail::col_gram(F, j, UG, G.data.data());
        out.P_V.push_back(spd_solve(G, delta, I));
    }
    for (int i = 0; i < b; ++i)
        for (int j = 0; j < b; ++j) {
            detail::hadamard_rr(UG.data() + size_t(i) * r * r, VG.data() + size_t(j) * r * r, r,
                                G.data.data());
            out.P_S.push_back(spd_solve(G, delta, I));
        }
    return out;
}

// Gaussian(0, epsilon^2) left/right factors and Uniform(0,1) couplings, drawn
// in a fixed order so a seed pins every entry.
inline BlastMatrix init_factors(int m, int n, int b, int r, double epsilon, std::uint64_t seed) {
    if (epsilon <= 0.0) throw std::invalid_argument("init scale must be positive");
    if (m <= 0 || n <= 0 || b <= 0 || r <= 0 || m % b != 0 || n % b != 0)
        throw DimensionMismatch("block count must divide both dimensions");
    const int p = m / b, q = n / b;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, epsilon);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> U(size_t(b) * p * r), V(size_t(b) * q * r), S(size_t(b) * b * r);
    for (double& x : U) x = gauss(rng);
    for (double& x : V) x = gauss(rng);
    for (double& x : S) x = unif(rng);
    return new_blast(m, n, b, r, std::move(U), std::move(V), std::move(S));
}

inline void validate(const FactorizeConfig& cfg) {
    if (cfg.b < 1 || cfg.r < 1 || cfg.K < 1)
        throw std::invalid_argument("block count, rank and iteration count must be at least 1");
    if (cfg.epsilon <= 0.0) throw std::invalid_argument("init scale must be positive");
    if (cfg.delta0 <= 0.0) throw std::invalid_argument("delta0 must be positive");
    if (cfg.delta_floor < 0.0) throw std::invalid_argument("delta floor must be nonnegative");
    if (cfg.schedule.kind != StepSchedule::Kind::theorem1 &&
        (cfg.schedule.eta_start < 0.0 || cfg.schedule.eta_end < 0.0))
        throw std::invalid_argument("schedule step values must be nonnegative");
    if (cfg.method == Method::precgd && cfg.schedule.kind == StepSchedule::Kind::theorem1)
        throw std::invalid_argument(
            "the safe-bound schedule applies to plain gd only; preconditioned updates take "
            "explicit step values");
}

inline FactorizeReport factorize(const DenseMatrix& A, const FactorizeConfig& cfg) {
    validate(cfg);
    if (A.m % cfg.b != 0 || A.n % cfg.b != 0)
        throw DimensionMismatch("block count " + std::to_string(cfg.b) +
                                " must divide both target dimensions " + std::to_string(A.m) +
                                "x" + std::to_string(A.n));
    A.require_finite("target");
    const double norm_A = A.frobenius_norm();

    BlastMatrix F = init_factors(A.m, A.n, cfg.b, cfg.r, cfg.epsilon, cfg.seed);
    FactorizeReport rep;
    rep.history.reserve(cfg.K + 1);
    auto record = [&](int it, double secs) {
        const double l = loss(A, F);
        const double re = norm_A > 0.0 ? std::sqrt(2.0 * l) / norm_A
                                       : std::numeric_limits<double>::quiet_NaN();
        rep.history.push_back({it, l, re, secs});
    };
    record(0, 0.0);

    detail::SweepParams sp;
    if (cfg.method == Method::gd) {
        sp.mode = detail::SweepMode::scaled;
    } else {
        sp.mode = detail::SweepMode::prec;
        sp.delta0 = cfg.delta0;
        sp.delta_floor = cfg.delta_floor;
    }
    for (int k = 0; k < cfg.K; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        sp.eta = cfg.schedule.value_at(k, cfg.K);
        try {
            detail::alternating_sweep(A, F, sp);
        } catch (const SolveFailure&) {
            // an exploding iterate can overflow inside a phase before the
            // post-sweep check sees it
            if (!F.all_finite()) throw NonFiniteUpdate("non-finite factor entry", k);
            throw;
        }
        if (!F.all_finite()) throw NonFiniteUpdate("non-finite factor entry", k);
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        record(k + 1, dt.count());
    }
    rep.factors = std::move(F);
    return rep;
}

}  // namespace blast
