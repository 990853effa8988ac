#pragma once

// Dense data-parallel kernels used on the hot paths of reconstruction.
//
// Every kernel exists twice: a plain serial loop in rsip::kernels::serial,
// kept as the reference implementation, and an OpenMP version in
// rsip::kernels::parallel. The parallel versions partition work so that each
// output element is produced by exactly one thread with the same summation
// order as the serial loop, so both produce bitwise identical results for
// any thread count.

#include <cstddef>
#include <span>

namespace rsip::kernels {

/// Row-major dense matrix view.
struct MatrixView {
    const double* data;
    std::size_t rows;
    std::size_t cols;
};

/// Adam hyperparameters for one step, with the bias corrections folded in.
struct AdamStepCoefficients {
    double beta1;
    double beta2;
    double step_size;     // lr / (1 - beta1^t)
    double inv_bias2;     // 1 / (1 - beta2^t)
    double eps;
};

namespace serial {

// y = A x + b (b may be empty)
void gemv(MatrixView a, std::span<const double> x, std::span<const double> b,
          std::span<double> y);
// y = A^T x
void gemv_t(MatrixView a, std::span<const double> x, std::span<double> y);
// out(i, j) = u[i] * v[j], out is rows x cols row-major
void outer(std::span<const double> u, std::span<const double> v, std::span<double> out);
void adam_update(std::span<double> params, std::span<const double> grad,
                 std::span<double> m, std::span<double> v, const AdamStepCoefficients& c);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace serial

namespace parallel {

void gemv(MatrixView a, std::span<const double> x, std::span<const double> b,
          std::span<double> y);
void gemv_t(MatrixView a, std::span<const double> x, std::span<double> y);
void outer(std::span<const double> u, std::span<const double> v, std::span<double> out);
void adam_update(std::span<double> params, std::span<const double> grad,
                 std::span<double> m, std::span<double> v, const AdamStepCoefficients& c);

}  // namespace parallel

/// Caps the OpenMP worker count from EIT_RSIP_THREADS, if set. Returns the cap in effect.
int configure_threads_from_env();

}  // namespace rsip::kernels
