#include "rsip/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace rsip::kernels {

namespace {

// Below this many multiply-adds a kernel runs on the calling thread only.
constexpr std::size_t kParallelThreshold = 1 << 15;

bool worth_parallel(std::size_t work) {
    return work >= kParallelThreshold && omp_get_max_threads() > 1;
}

}  // namespace

namespace parallel {

void gemv(MatrixView a, std::span<const double> x, std::span<const double> b,
          std::span<double> y) {
    const auto rows = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static) if (worth_parallel(a.rows * a.cols))
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const double* row = a.data + static_cast<std::size_t>(i) * a.cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
        y[i] = b.empty() ? acc : acc + b[i];
    }
}

// Column blocks are owned by one thread each; within a block the row sweep
// runs in the same order as the serial kernel.
void gemv_t(MatrixView a, std::span<const double> x, std::span<double> y) {
    constexpr std::size_t kBlock = 512;
    const auto blocks = static_cast<std::ptrdiff_t>((a.cols + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static) if (worth_parallel(a.rows * a.cols))
    for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
        const std::size_t j0 = static_cast<std::size_t>(blk) * kBlock;
        const std::size_t j1 = std::min(a.cols, j0 + kBlock);
        for (std::size_t j = j0; j < j1; ++j) y[j] = 0.0;
        for (std::size_t i = 0; i < a.rows; ++i) {
            const double* row = a.data + i * a.cols;
            const double xi = x[i];
            for (std::size_t j = j0; j < j1; ++j) y[j] += row[j] * xi;
        }
    }
}

void outer(std::span<const double> u, std::span<const double> v, std::span<double> out) {
    const std::size_t cols = v.size();
    const auto rows = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static) if (worth_parallel(u.size() * cols))
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        double* row = out.data() + static_cast<std::size_t>(i) * cols;
        const double ui = u[i];
        for (std::size_t j = 0; j < cols; ++j) row[j] = ui * v[j];
    }
}

void adam_update(std::span<double> params, std::span<const double> grad,
                 std::span<double> m, std::span<double> v, const AdamStepCoefficients& c) {
    const auto n = static_cast<std::ptrdiff_t>(params.size());
#pragma omp parallel for schedule(static) if (worth_parallel(params.size()))
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const double g = grad[k];
        m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g;
        v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g * g;
        params[k] -= c.step_size * m[k] / (std::sqrt(v[k] * c.inv_bias2) + c.eps);
    }
}

}  // namespace parallel

int configure_threads_from_env() {
    if (const char* env = std::getenv("EIT_RSIP_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1) omp_set_num_threads(cap);
        } catch (const std::exception&) {
            // ignore malformed values and keep the OpenMP default
        }
    }
    return omp_get_max_threads();
}

}  // namespace rsip::kernels
