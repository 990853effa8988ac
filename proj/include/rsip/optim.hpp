#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rsip {

/// Moment estimates and hyperparameters of one Adam optimizer instance.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_hat = 1e-8;
    double lr = 1e-3;

    static AdamState zeros(std::size_t n, double lr);
    bool operator==(const AdamState&) const = default;
};

/// One bias-corrected Adam update of params in place. Throws
/// NumericalError on a non-finite gradient and InvalidArgument on length
/// mismatch.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad);

}  // namespace rsip
