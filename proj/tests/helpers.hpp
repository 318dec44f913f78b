#pragma once

// Shared test utilities. Oracles here are written independently of the
// library code paths they check: they build explicit padded arrays, scripted
// recurrences, and textbook formulas instead of calling back into the
// implementation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "statetrace/matrix.hpp"
#include "statetrace/random.hpp"

namespace testutil {

// --- convolution oracle -----------------------------------------------------

// Physically materialize the reflect-padded signal (edge sample repeated),
// then convolve by direct summation.
inline std::vector<double> convolve_reflect_oracle(const std::vector<double>& signal,
                                                   const std::vector<double>& kernel) {
    const std::size_t radius = kernel.size() / 2;
    std::vector<double> padded;
    padded.reserve(signal.size() + 2 * radius);
    for (std::size_t k = 0; k < radius; ++k) {
        // left pad, nearest first when walking outward: s[0], s[1], ...
        padded.push_back(signal[std::min(radius - 1 - k, signal.size() - 1)]);
    }
    for (double v : signal) {
        padded.push_back(v);
    }
    for (std::size_t k = 0; k < radius; ++k) {
        padded.push_back(signal[signal.size() - 1 - std::min(k, signal.size() - 1)]);
    }
    std::vector<double> out(signal.size(), 0.0);
    for (std::size_t t = 0; t < signal.size(); ++t) {
        double acc = 0.0;
        for (std::size_t k = 0; k < kernel.size(); ++k) {
            acc += kernel[k] * padded[t + k];
        }
        out[t] = acc;
    }
    return out;
}

// --- per-row Euclidean norm oracle -------------------------------------------

inline std::vector<double> row_norm_oracle(const statetrace::Matrix& a,
                                           const statetrace::Matrix& b) {
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double ss = 0.0;
        for (std::size_t c = 0; c < a.cols(); ++c) {
            const double d = a(r, c) - b(r, c);
            ss += d * d;
        }
        out[r] = std::sqrt(ss);
    }
    return out;
}

// --- Pearson correlation oracle ----------------------------------------------

// Textbook two-pass formula per channel pair.
inline statetrace::Matrix pearson_oracle(const statetrace::Matrix& segment) {
    const std::size_t n = segment.rows();
    const std::size_t k = segment.cols();
    std::vector<double> mean(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t r = 0; r < n; ++r) {
            mean[c] += segment(r, c);
        }
        mean[c] /= static_cast<double>(n);
    }
    statetrace::Matrix corr(k, k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        corr(i, i) = 1.0;
        for (std::size_t j = i + 1; j < k; ++j) {
            double sxy = 0.0, sxx = 0.0, syy = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double dx = segment(r, i) - mean[i];
                const double dy = segment(r, j) - mean[j];
                sxy += dx * dy;
                sxx += dx * dx;
                syy += dy * dy;
            }
            const double denom = std::sqrt(sxx) * std::sqrt(syy);
            const double rho = denom > 0.0 ? sxy / denom : 0.0;
            corr(i, j) = rho;
            corr(j, i) = rho;
        }
    }
    return corr;
}

// --- nearest-distance oracle --------------------------------------------------

// Exhaustive scan: for each query index, minimum absolute distance to any
// reference index.
inline std::vector<double> nearest_distance_oracle(const std::vector<std::size_t>& queries,
                                                   const std::vector<std::size_t>& refs) {
    std::vector<double> out;
    out.reserve(queries.size());
    for (std::size_t q : queries) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r : refs) {
            const double d = q >= r ? static_cast<double>(q - r) : static_cast<double>(r - q);
            best = std::min(best, d);
        }
        out.push_back(best);
    }
    return out;
}

// --- symmetric eigenvalues (Jacobi) -------------------------------------------

// Cyclic Jacobi rotations; plenty for the small matrices in tests.
inline std::vector<double> symmetric_eigenvalues(statetrace::Matrix a) {
    const std::size_t n = a.rows();
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                off += a(i, j) * a(i, j);
            }
        }
        if (off < 1e-24) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) {
        eig[i] = a(i, i);
    }
    return eig;
}

// --- misc ----------------------------------------------------------------------

inline statetrace::Matrix random_matrix(statetrace::RandomSource& rng, std::size_t rows,
                                        std::size_t cols, double scale = 1.0) {
    statetrace::Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            m(r, c) = rng.uniform(-scale, scale);
        }
    }
    return m;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        base_ = std::filesystem::temp_directory_path() /
                ("statetrace_test_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(base_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(base_, ec);
    }
    const std::filesystem::path& path() const { return base_; }

private:
    std::filesystem::path base_;
};

}  // namespace testutil
