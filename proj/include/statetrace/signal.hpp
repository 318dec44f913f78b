#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "statetrace/errors.hpp"

namespace statetrace {

/// Normalized Gaussian weights sampled at integer offsets, truncated at
/// radius ceil(3 * std) (minimum 1) so >99.7% of the mass is kept and tests
/// can reproduce the weights exactly. Length is always odd, weights sum to 1.
inline std::vector<double> gaussian_kernel(double std_samples) {
    detail::require(std_samples > 0.0 && std::isfinite(std_samples),
                    "gaussian_kernel: std must be positive and finite");
    const auto radius =
        static_cast<std::size_t>(std::max(1.0, std::ceil(3.0 * std_samples)));
    std::vector<double> weights(2 * radius + 1);
    const double inv_two_var = 1.0 / (2.0 * std_samples * std_samples);
    double sum = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double x = static_cast<double>(k) - static_cast<double>(radius);
        weights[k] = std::exp(-x * x * inv_two_var);
        sum += weights[k];
    }
    for (double& w : weights) {
        w /= sum;
    }
    return weights;
}

namespace detail {

// Mirror an out-of-range index back into [0, n) with the edge sample
// repeated: -1 -> 0, n -> n-1. Loops to cover offsets past one full span.
inline std::size_t reflect_index(long long i, long long n) {
    while (i < 0 || i >= n) {
        if (i < 0) {
            i = -i - 1;
        } else {
            i = 2 * n - i - 1;
        }
    }
    return static_cast<std::size_t>(i);
}

}  // namespace detail

/// Same-length 1-D convolution with reflect padding at both ends. The kernel
/// must have odd length; its center is aligned with the output sample.
inline std::vector<double> convolve_same(const std::vector<double>& signal,
                                         const std::vector<double>& kernel) {
    detail::require(kernel.size() % 2 == 1, "convolve_same: kernel length must be odd");
    detail::require(!signal.empty(), "convolve_same: empty signal");
    const auto n = static_cast<long long>(signal.size());
    const auto radius = static_cast<long long>(kernel.size() / 2);
    std::vector<double> out(signal.size(), 0.0);
    for (long long t = 0; t < n; ++t) {
        double acc = 0.0;
        for (long long k = -radius; k <= radius; ++k) {
            acc += kernel[static_cast<std::size_t>(k + radius)] *
                   signal[detail::reflect_index(t + k, n)];
        }
        out[static_cast<std::size_t>(t)] = acc;
    }
    return out;
}

}  // namespace statetrace
