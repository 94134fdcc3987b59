#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blast/blast.hpp"

namespace {

blast::StepSchedule parse_schedule(const std::string& text) {
    if (text == "linear") return blast::StepSchedule::linear(1.0, 0.0);
    if (text == "theorem1") return blast::StepSchedule::safe_bounds();
    const std::string prefix = "constant:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string num = text.substr(prefix.size());
        size_t used = 0;
        double eta = 0.0;
        try {
            eta = std::stod(num, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("schedule constant requires a numeric step size");
        }
        if (used != num.size() || !std::isfinite(eta) || eta <= 0.0)
            throw std::invalid_argument("schedule constant step size must be positive and finite");
        return blast::StepSchedule::fixed(eta);
    }
    throw std::invalid_argument("schedule must be linear, constant:ETA, or theorem1");
}

void print_value(const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    std::cerr << key << " = " << buf << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"block low-rank structured matrix toolkit"};
    app.require_subcommand(1);

    struct {
        std::string input, output, history;
        std::string method = "precgd";
        std::string schedule = "linear";
        int b = 0, r = 0, iters = 300;
        double delta0 = 0.1, epsilon = 0.01;
        std::uint64_t seed = 0;
    } co;
    auto* compress = app.add_subcommand("compress", "factor a dense matrix into structured form");
    compress->add_option("--input", co.input, "dense input matrix (.npy)")->required();
    compress->add_option("--output", co.output, "factor container to write")->required();
    compress->add_option("--b", co.b, "blocks per side")->required();
    compress->add_option("--r", co.r, "coupling rank")->required();
    compress->add_option("--method", co.method, "gd or precgd")
        ->check(CLI::IsMember({"gd", "precgd"}));
    compress->add_option("--iters", co.iters, "iteration count");
    compress->add_option("--delta0", co.delta0, "preconditioner damping scale");
    compress->add_option("--epsilon", co.epsilon, "init scale");
    compress->add_option("--seed", co.seed, "init seed");
    compress->add_option("--schedule", co.schedule, "linear, constant:ETA, or theorem1");
    compress->add_option("--history", co.history, "per-iteration CSV to write");

    struct {
        std::string input, output;
    } ro;
    auto* reconstruct = app.add_subcommand("reconstruct", "expand a factor container to dense");
    reconstruct->add_option("--input", ro.input, "factor container")->required();
    reconstruct->add_option("--output", ro.output, "dense output (.npy)")->required();

    std::string info_input;
    auto* info = app.add_subcommand("info", "print container metadata as JSON");
    info->add_option("--input", info_input, "factor container")->required();

    struct {
        std::string input;
        int trials = 10, batch = 64;
    } bo;
    auto* bench = app.add_subcommand("bench", "time structured against dense products");
    bench->add_option("--input", bo.input, "factor container")->required();
    bench->add_option("--trials", bo.trials, "timed repetitions");
    bench->add_option("--batch", bo.batch, "rows per product");

    blast::SynthParams sp;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "run the synthetic convergence experiments");
    synth->add_option("--experiment", sp.experiment, "lowrank or blast")
        ->check(CLI::IsMember({"lowrank", "blast"}));
    synth->add_option("--n", sp.n, "target side length");
    synth->add_option("--rstar", sp.rstar, "target rank");
    synth->add_option("--b", sp.b, "blocks per side");
    synth->add_option("--r", sp.r, "coupling rank");
    synth->add_option("--iters", sp.iters, "iterations per run");
    synth->add_option("--seeds", sp.seeds, "number of seeds");
    synth->add_option("--out", synth_out, "long-format curve CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (compress->parsed()) {
            blast::FactorizeConfig cfg;
            cfg.b = co.b;
            cfg.r = co.r;
            cfg.K = co.iters;
            cfg.epsilon = co.epsilon;
            cfg.delta0 = co.delta0;
            cfg.seed = co.seed;
            cfg.method = co.method == "gd" ? blast::Method::gd : blast::Method::precgd;
            cfg.schedule = parse_schedule(co.schedule);
            blast::validate(cfg);

            bool widened = false;
            const blast::DenseMatrix A = blast::read_dense(co.input, &widened);
            if (widened) std::cerr << "note: single-precision input widened to double\n";
            const blast::FactorizeReport rep = blast::factorize(A, cfg);
            blast::write_blast(co.output, rep.factors);
            if (!co.history.empty()) blast::write_history_csv(co.history, rep);

            print_value("final_loss", rep.history.back().loss);
            print_value("rel_err", rep.history.back().rel_err);
            std::cerr << "param_count = " << blast::param_count(rep.factors) << "\n";
            print_value("compression_ratio", blast::compression_ratio(rep.factors));
            std::cerr << "matvec_flops = " << blast::matvec_flops(rep.factors) << "\n";
            return 0;
        }

        if (reconstruct->parsed()) {
            const blast::BlastMatrix A = blast::read_blast(ro.input);
            blast::write_dense(ro.output, blast::to_dense(A));
            return 0;
        }

        if (info->parsed()) {
            const blast::BlastMatrix A = blast::read_blast(info_input);
            nlohmann::json out = {{"m", A.m},
                                  {"n", A.n},
                                  {"b", A.b},
                                  {"r", A.r},
                                  {"param_count", blast::param_count(A)},
                                  {"matvec_flops", blast::matvec_flops(A)},
                                  {"compression_ratio", blast::compression_ratio(A)}};
            std::cout << out.dump() << "\n";
            return 0;
        }

        if (bench->parsed()) {
            if (bo.trials < 1) throw std::invalid_argument("trials must be at least 1");
            if (bo.batch < 1) throw std::invalid_argument("batch must be at least 1");
            const blast::BlastMatrix A = blast::read_blast(bo.input);
            const blast::DenseMatrix D = blast::to_dense(A);

            std::mt19937_64 rng(9001);
            std::normal_distribution<double> gauss(0.0, 1.0);
            blast::DenseMatrix X(bo.batch, A.n);
            for (double& x : X.data) x = gauss(rng);

            const blast::DenseMatrix Y1 = blast::matmul(A, X);
            const blast::DenseMatrix Y2 = blast::dense_apply(D, X);
            double diff = 0.0, ref = 0.0;
            for (size_t k = 0; k < Y1.data.size(); ++k) {
                const double d = Y1.data[k] - Y2.data[k];
                diff += d * d;
                ref += Y2.data[k] * Y2.data[k];
            }
            if (!(std::sqrt(diff) <= 1e-10 * std::max(std::sqrt(ref), 1.0)))
                throw blast::Error("structured and dense products disagree beyond 1e-10");

            std::vector<double> ts_blast, ts_dense;
            double sink = 0.0;
            for (int t = 0; t < bo.trials; ++t) {
                auto t0 = std::chrono::steady_clock::now();
                const blast::DenseMatrix Yb = blast::matmul(A, X);
                ts_blast.push_back(seconds_since(t0));
                t0 = std::chrono::steady_clock::now();
                const blast::DenseMatrix Yd = blast::dense_apply(D, X);
                ts_dense.push_back(seconds_since(t0));
                sink += Yb.data[0] - Yd.data[0];
            }
            if (!std::isfinite(sink))
                throw blast::Error("product produced non-finite entries during timing");
            print_value("blast_matmul_median_s", blast::median(ts_blast));
            print_value("dense_matmul_median_s", blast::median(ts_dense));
            print_value("flops_ratio",
                        double(blast::matvec_flops(A)) / (double(A.m) * double(A.n)));
            return 0;
        }

        if (synth->parsed()) {
            const blast::SynthSummary sum = blast::run_synth(sp);
            std::ofstream out(synth_out);
            if (!out) throw blast::IoFailure("cannot open " + synth_out + " for writing");
            out << "experiment,method,seed,iter,rel_err\n";
            char buf[64];
            for (const auto& c : sum.curves)
                for (size_t k = 0; k < c.rel_err.size(); ++k) {
                    out << sp.experiment << ',' << c.method << ',' << c.seed << ',' << k << ',';
                    if (!std::isnan(c.rel_err[k])) {
                        std::snprintf(buf, sizeof(buf), "%.17g", c.rel_err[k]);
                        out << buf;
                    }
                    out << '\n';
                }
            if (!out) throw blast::IoFailure("failed writing " + synth_out);
            print_value("gd_median_final", sum.gd_median_final);
            print_value("precgd_median_final", sum.precgd_median_final);
            return 0;
        }
    } catch (const blast::NonFiniteUpdate& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const blast::SolveFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
