#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "blast/errors.hpp"

namespace blast {

// Plain row-major matrix of doubles.
struct DenseMatrix {
    int m = 0;
    int n = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : m(rows), n(cols), data(size_t(rows) * cols, 0.0) {
        if (rows <= 0 || cols <= 0)
            throw DimensionMismatch("matrix dimensions must be positive");
    }
    DenseMatrix(int rows, int cols, std::vector<double> values)
        : m(rows), n(cols), data(std::move(values)) {
        if (rows <= 0 || cols <= 0)
            throw DimensionMismatch("matrix dimensions must be positive");
        if (data.size() != size_t(rows) * cols)
            throw DimensionMismatch("data length " + std::to_string(data.size()) +
                                    " does not match " + std::to_string(rows) + "x" +
                                    std::to_string(cols));
    }

    double& operator()(int i, int j) { return data[size_t(i) * n + j]; }
    double operator()(int i, int j) const { return data[size_t(i) * n + j]; }

    const double* row(int i) const { return data.data() + size_t(i) * n; }
    double* row(int i) { return data.data() + size_t(i) * n; }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

    void require_finite(const char* what) const {
        if (!all_finite()) throw NonFiniteInput(std::string(what) + " contains a non-finite entry");
    }

    double frobenius_norm() const {
        double acc = 0.0;
        for (double v : data) acc += v * v;
        return std::sqrt(acc);
    }
};

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace blast
