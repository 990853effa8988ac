#include "rsip/kernels.hpp"

#include <cmath>

namespace rsip::kernels::serial {

void gemv(MatrixView a, std::span<const double> x, std::span<const double> b,
          std::span<double> y) {
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* row = a.data + i * a.cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
        y[i] = b.empty() ? acc : acc + b[i];
    }
}

void gemv_t(MatrixView a, std::span<const double> x, std::span<double> y) {
    for (std::size_t j = 0; j < a.cols; ++j) y[j] = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* row = a.data + i * a.cols;
        const double xi = x[i];
        for (std::size_t j = 0; j < a.cols; ++j) y[j] += row[j] * xi;
    }
}

void outer(std::span<const double> u, std::span<const double> v, std::span<double> out) {
    const std::size_t cols = v.size();
    for (std::size_t i = 0; i < u.size(); ++i) {
        double* row = out.data() + i * cols;
        const double ui = u[i];
        for (std::size_t j = 0; j < cols; ++j) row[j] = ui * v[j];
    }
}

void adam_update(std::span<double> params, std::span<const double> grad,
                 std::span<double> m, std::span<double> v, const AdamStepCoefficients& c) {
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double g = grad[k];
        m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * g;
        v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * g * g;
        params[k] -= c.step_size * m[k] / (std::sqrt(v[k] * c.inv_bias2) + c.eps);
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
    return acc;
}

}  // namespace rsip::kernels::serial
