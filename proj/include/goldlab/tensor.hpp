#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "goldlab/errors.hpp"

namespace goldlab {

// Dense row-major matrix of doubles; the carrier for inputs, activations and
// parameters everywhere in the project.
struct Tensor2D {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Tensor2D() = default;
    Tensor2D(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    Tensor2D(std::size_t r, std::size_t c, std::vector<double> values)
        : rows(r), cols(c), data(std::move(values)) {
        if (data.size() != rows * cols)
            throw DimensionError("Tensor2D: data length " + std::to_string(data.size()) +
                                 " != rows*cols " + std::to_string(rows * cols));
    }

    std::size_t size() const { return rows * cols; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
    double* ptr() { return data.data(); }
    const double* ptr() const { return data.data(); }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    bool same_shape(const Tensor2D& other) const {
        return rows == other.rows && cols == other.cols;
    }
};

inline bool all_finite(const Tensor2D& t) {
    for (double v : t.data)
        if (!std::isfinite(v)) return false;
    return true;
}

inline void ensure_finite(const Tensor2D& t, const char* context) {
    if (!all_finite(t)) throw NumericError(std::string("non-finite value in ") + context);
}

inline Tensor2D transpose(const Tensor2D& t) {
    Tensor2D out(t.cols, t.rows);
    for (std::size_t r = 0; r < t.rows; ++r)
        for (std::size_t c = 0; c < t.cols; ++c) out.at(c, r) = t.at(r, c);
    return out;
}

}  // namespace goldlab
