#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "blast/blast_matrix.hpp"
#include "blast/dense.hpp"
#include "blast/errors.hpp"
#include "blast/factorize.hpp"
#include "blast/npy.hpp"

namespace blast {

inline DenseMatrix read_dense(const std::string& path, bool* from_float32 = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path);
    NpyArray arr = read_npy(in);
    if (arr.shape.size() != 2)
        throw NotTwoDimensional("expected a 2-D array, got " + std::to_string(arr.shape.size()) +
                                " dimensions");
    if (arr.shape[0] < 1 || arr.shape[1] < 1 || arr.shape[0] > (1u << 30) ||
        arr.shape[1] > (1u << 30))
        throw ShapeMismatch("unreasonable array dimensions");
    if (from_float32) *from_float32 = arr.from_float32;
    return DenseMatrix(int(arr.shape[0]), int(arr.shape[1]), std::move(arr.data));
}

inline void write_dense(const std::string& path, const DenseMatrix& D) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    write_npy(out, {std::uint64_t(D.m), std::uint64_t(D.n)}, D.data.data(), D.data.size());
}

// Single-file container: a length-prefixed JSON manifest line, then the three
// factor arrays in U, V, S order.
inline void write_blast(const std::string& path, const BlastMatrix& A) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    nlohmann::json manifest = {{"version", 1}, {"m", A.m},         {"n", A.n},
                               {"b", A.b},     {"r", A.r},         {"dtype", "<f8"}};
    std::string line = manifest.dump() + "\n";
    const std::uint32_t len = std::uint32_t(line.size());
    char lenbytes[4] = {char(len & 0xff), char((len >> 8) & 0xff), char((len >> 16) & 0xff),
                        char((len >> 24) & 0xff)};
    out.write(lenbytes, 4);
    out.write(line.data(), std::streamsize(line.size()));
    const std::uint64_t b = A.b, p = A.p(), q = A.q(), r = A.r;
    write_npy(out, {b, p, r}, A.U.data(), A.U.size());
    write_npy(out, {b, q, r}, A.V.data(), A.V.size());
    write_npy(out, {b, b, r}, A.S.data(), A.S.size());
    if (!out) throw IoFailure("failed writing container " + path);
}

inline BlastMatrix read_blast(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path);
    unsigned char lenbytes[4];
    if (!in.read(reinterpret_cast<char*>(lenbytes), 4))
        throw CorruptHeader("truncated container prefix");
    const std::uint32_t len = std::uint32_t(lenbytes[0]) | (std::uint32_t(lenbytes[1]) << 8) |
                              (std::uint32_t(lenbytes[2]) << 16) |
                              (std::uint32_t(lenbytes[3]) << 24);
    if (len == 0 || len > (1u << 20)) throw CorruptHeader("implausible manifest length");
    std::string line(len, '\0');
    if (!in.read(line.data(), len)) throw CorruptHeader("truncated manifest");
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
        throw CorruptHeader("manifest is not valid JSON");
    }
    int version, m, n, b, r;
    std::string dtype;
    try {
        version = manifest.at("version").get<int>();
        m = manifest.at("m").get<int>();
        n = manifest.at("n").get<int>();
        b = manifest.at("b").get<int>();
        r = manifest.at("r").get<int>();
        dtype = manifest.at("dtype").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw CorruptHeader("manifest is missing required fields");
    }
    if (version != 1)
        throw VersionMismatch("container version " + std::to_string(version) +
                              " is not supported (expected 1)");
    if (dtype != "<f8") throw UnsupportedDtype("container dtype must be <f8");
    if (m < 1 || n < 1 || b < 1 || r < 1 || m % b != 0 || n % b != 0)
        throw ShapeMismatch("manifest dimensions are inconsistent");
    const std::uint64_t p = std::uint64_t(m) / b, q = std::uint64_t(n) / b;
    NpyArray U = read_npy(in), V = read_npy(in), S = read_npy(in);
    const std::vector<std::uint64_t> ushape = {std::uint64_t(b), p, std::uint64_t(r)};
    const std::vector<std::uint64_t> vshape = {std::uint64_t(b), q, std::uint64_t(r)};
    const std::vector<std::uint64_t> sshape = {std::uint64_t(b), std::uint64_t(b),
                                               std::uint64_t(r)};
    if (U.shape != ushape || V.shape != vshape || S.shape != sshape)
        throw ShapeMismatch("factor array shapes do not match the manifest");
    if (U.from_float32 || V.from_float32 || S.from_float32)
        throw CorruptHeader("factor payload dtype differs from manifest");
    return new_blast(m, n, b, r, std::move(U.data), std::move(V.data), std::move(S.data));
}

// One row per recorded iteration; the error column is left empty for a
// zero-norm target where relative error is undefined.
inline void write_history_csv(const std::string& path, const FactorizeReport& report) {
    if (report.history.empty()) throw std::invalid_argument("history is empty");
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    out << "iter,loss,rel_err\n";
    char buf[64];
    for (const auto& h : report.history) {
        std::snprintf(buf, sizeof(buf), "%.17g", h.loss);
        out << h.iteration << ',' << buf << ',';
        if (!std::isnan(h.rel_err)) {
            std::snprintf(buf, sizeof(buf), "%.17g", h.rel_err);
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw IoFailure("failed writing " + path);
}

}  // namespace blast
