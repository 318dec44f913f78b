#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "statetrace/errors.hpp"

namespace statetrace {

/// Dense row-major matrix of 64-bit reals. Rows are contiguous, so per-row
/// views are cheap and inner loops over columns vectorize.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
        std::size_t r = 0;
        for (const auto& row : rows) {
            detail::require(row.size() == m.cols_, "Matrix::from_rows: ragged rows");
            std::size_t c = 0;
            for (double v : row) {
                m(r, c++) = v;
            }
            ++r;
        }
        return m;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    double* row(std::size_t r) { return values_.data() + r * cols_; }
    const double* row(std::size_t r) const { return values_.data() + r * cols_; }

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    void fill(double v) { values_.assign(values_.size(), v); }

    bool all_finite() const {
        for (double v : values_) {
            if (!std::isfinite(v)) {
                return false;
            }
        }
        return true;
    }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Per-time-point functional profiles of one subject: T rows (time points)
/// by K columns (channels).
struct TimeCourses {
    std::string subject_id;
    Matrix data;

    std::size_t length() const { return data.rows(); }    // T
    std::size_t channels() const { return data.cols(); }  // K
};

inline void validate_time_courses(const TimeCourses& tc) {
    detail::require(tc.length() >= 2, "TimeCourses: need at least 2 time points");
    detail::require(tc.channels() >= 1, "TimeCourses: need at least 1 channel");
    detail::require(tc.data.all_finite(), "TimeCourses: non-finite value");
}

namespace detail {

// y += A * x, A row-major (m x n). Four accumulators per row keep the FP
// order fixed in source while exposing instruction-level parallelism.
inline void matvec_add(const Matrix& a, const double* x, double* y) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = a.row(i);
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            s0 += row[j] * x[j];
            s1 += row[j + 1] * x[j + 1];
            s2 += row[j + 2] * x[j + 2];
            s3 += row[j + 3] * x[j + 3];
        }
        for (; j < n; ++j) {
            s0 += row[j] * x[j];
        }
        y[i] += (s0 + s1) + (s2 + s3);
    }
}

// y += A^T * x, A row-major (m x n), y length n. Row-major friendly: walks
// each row once and scales it into y.
inline void matvec_transpose_add(const Matrix& a, const double* x, double* y) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    for (std::size_t i = 0; i < m; ++i) {
        const double xi = x[i];
        if (xi == 0.0) {
            continue;
        }
        const double* row = a.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            y[j] += xi * row[j];
        }
    }
}

// A += u * v^T (outer product accumulation).
inline void outer_add(Matrix& a, const double* u, const double* v) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    for (std::size_t i = 0; i < m; ++i) {
        double* row = a.row(i);
        const double ui = u[i];
        for (std::size_t j = 0; j < n; ++j) {
            row[j] += ui * v[j];
        }
    }
}

}  // namespace detail
}  // namespace statetrace
