#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "qrsim/qcore.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qrsim {

// Deterministic data-parallel accumulation. Samples are grouped into fixed
// blocks; each block is summed sequentially and blocks are reduced in index
// order, so the result is bit-identical for any thread count — including the
// serial reference path (parallel = false), which the tests compare against.

inline constexpr std::int64_t kParallelBlock = 64;

// Mean of f(i) over i in [0, n). f must be pure in i (substream RNGs only).
template <class F>
double mean_over_samples(std::int64_t n, F&& f, bool parallel) {
    const std::int64_t blocks = (n + kParallelBlock - 1) / kParallelBlock;
    std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (std::int64_t b = 0; b < blocks; ++b) {
        double acc = 0.0;
        const std::int64_t hi = std::min(n, (b + 1) * kParallelBlock);
        for (std::int64_t i = b * kParallelBlock; i < hi; ++i) acc += f(i);
        partial[static_cast<std::size_t>(b)] = acc;
    }
    double total = 0.0;
    for (double v : partial) total += v;
    return total / static_cast<double>(n);
}

// Mean and standard error of f(i) over i in [0, n).
template <class F>
std::pair<double, double> mean_stderr_over_samples(std::int64_t n, F&& f, bool parallel) {
    std::vector<double> vals(static_cast<std::size_t>(n));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (std::int64_t i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = f(i);
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= std::max<std::int64_t>(1, n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

// Matrix mean of f(i) over i in [0, n); f returns a dim x dim matrix.
template <class F>
Matrix matrix_mean_over_samples(std::int64_t n, int dim, F&& f, bool parallel) {
    const std::int64_t blocks = (n + kParallelBlock - 1) / kParallelBlock;
    std::vector<Matrix> partial(static_cast<std::size_t>(blocks));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (std::int64_t b = 0; b < blocks; ++b) {
        Matrix acc = Matrix::Zero(dim, dim);
        const std::int64_t hi = std::min(n, (b + 1) * kParallelBlock);
        for (std::int64_t i = b * kParallelBlock; i < hi; ++i) acc += f(i);
        partial[static_cast<std::size_t>(b)] = std::move(acc);
    }
    Matrix total = Matrix::Zero(dim, dim);
    for (const Matrix& m : partial) total += m;
    return total / static_cast<double>(n);
}

}  // namespace qrsim
