#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "blast/dense.hpp"
#include "blast/factorize.hpp"
#include "blast/ops.hpp"

namespace blast {

inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of an empty set");
    std::sort(v.begin(), v.end());
    const size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// product of two standard normal factors, scaled to unit Frobenius norm
inline DenseMatrix make_lowrank_target(int n, int rstar, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    DenseMatrix G1(n, rstar), G2(n, rstar);
    for (double& x : G1.data) x = gauss(rng);
    for (double& x : G2.data) x = gauss(rng);
    DenseMatrix D(n, n);
    for (int i = 0; i < n; ++i) {
        const double* g1 = G1.row(i);
        double* drow = D.row(i);
        for (int j = 0; j < n; ++j) {
            const double* g2 = G2.row(j);
            double acc = 0.0;
            for (int c = 0; c < rstar; ++c) acc += g1[c] * g2[c];
            drow[j] = acc;
        }
    }
    const double norm = D.frobenius_norm();
    for (double& x : D.data) x /= norm;
    return D;
}

// random unit-scale structured factors materialized dense, unit Frobenius norm
inline DenseMatrix make_blast_target(int n, int b, int rstar, std::uint64_t seed) {
    BlastMatrix T = init_factors(n, n, b, rstar, 1.0, seed);
    DenseMatrix D = to_dense(T);
    const double norm = D.frobenius_norm();
    for (double& x : D.data) x /= norm;
    return D;
}

struct SynthParams {
    std::string experiment = "lowrank";  // "lowrank" or "blast"
    int n = 256;
    int rstar = 8;
    int b = 16;
    int r = 8;
    int iters = 100;
    int seeds = 5;
};

struct SynthCurve {
    std::string method;
    int seed;
    std::vector<double> rel_err;  // iters+1 values, iteration 0 first
};

struct SynthSummary {
    std::vector<SynthCurve> curves;
    double gd_median_final = 0.0;
    double precgd_median_final = 0.0;

    double median_at(const std::string& method, size_t iter) const {
        std::vector<double> vals;
        for (const auto& c : curves)
            if (c.method == method && iter < c.rel_err.size()) vals.push_back(c.rel_err[iter]);
        return median(vals);
    }
};

inline std::uint64_t synth_target_seed(int s) { return 1000003ull + 7919ull * std::uint64_t(s); }

// The convergence experiment: fresh random target per seed, then both methods
// factorize it from the same random init under the decaying schedule.
inline SynthSummary run_synth(const SynthParams& sp) {
    if (sp.experiment != "lowrank" && sp.experiment != "blast")
        throw std::invalid_argument("experiment must be lowrank or blast");
    if (sp.n < 1 || sp.rstar < 1 || sp.b < 1 || sp.r < 1 || sp.iters < 1 || sp.seeds < 1)
        throw std::invalid_argument("experiment parameters must be positive");
    if (sp.n % sp.b != 0)
        throw std::invalid_argument("block count must divide the experiment size");

    SynthSummary out;
    std::vector<double> gd_finals, precgd_finals;
    for (int s = 0; s < sp.seeds; ++s) {
        const DenseMatrix target =
            sp.experiment == "lowrank"
                ? make_lowrank_target(sp.n, sp.rstar, synth_target_seed(s))
                : make_blast_target(sp.n, sp.b, sp.rstar, synth_target_seed(s));
        for (Method method : {Method::gd, Method::precgd}) {
            FactorizeConfig cfg;
            cfg.b = sp.b;
            cfg.r = sp.r;
            cfg.K = sp.iters;
            cfg.epsilon = 1e-2;
            cfg.delta0 = 0.1;
            cfg.schedule = StepSchedule::linear(1.0, 0.0);
            cfg.seed = std::uint64_t(s);
            cfg.method = method;
            FactorizeReport rep = factorize(target, cfg);
            SynthCurve curve;
            curve.method = method == Method::gd ? "gd" : "precgd";
            curve.seed = s;
            for (const auto& h : rep.history) curve.rel_err.push_back(h.rel_err);
            (method == Method::gd ? gd_finals : precgd_finals).push_back(curve.rel_err.back());
            out.curves.push_back(std::move(curve));
        }
    }
    out.gd_median_final = median(gd_finals);
    out.precgd_median_final = median(precgd_finals);
    return out;
}

}  // namespace blast
