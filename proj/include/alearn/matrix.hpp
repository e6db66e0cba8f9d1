#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "alearn/errors.hpp"

namespace alearn {

/// Dense row-major matrix of 64-bit reals. 64-bit storage everywhere: the
/// test suites check against 1e-9 oracle tolerances.
struct Matrix {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::int64_t r, std::int64_t c)
        : rows(r), cols(c), data(static_cast<std::size_t>(r * c), 0.0) {}

    static Matrix zeros(std::int64_t r, std::int64_t c) { return Matrix(r, c); }

    double& at(std::int64_t r, std::int64_t c) {
        return data[static_cast<std::size_t>(r * cols + c)];
    }
    double at(std::int64_t r, std::int64_t c) const {
        return data[static_cast<std::size_t>(r * cols + c)];
    }

    std::span<double> row(std::int64_t r) {
        return {data.data() + r * cols, static_cast<std::size_t>(cols)};
    }
    std::span<const double> row(std::int64_t r) const {
        return {data.data() + r * cols, static_cast<std::size_t>(cols)};
    }

    bool same_shape(const Matrix& other) const {
        return rows == other.rows && cols == other.cols;
    }

    bool operator==(const Matrix&) const = default;
};

} // namespace alearn
