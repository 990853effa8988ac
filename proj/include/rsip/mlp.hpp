#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rsip {

struct MlpShape {
    std::size_t inputs = 0;   // G
    std::size_t hidden = 0;   // H
    std::size_t outputs = 0;  // N

    std::size_t parameter_count() const { return hidden * inputs + hidden + outputs * hidden + outputs; }
    bool operator==(const MlpShape&) const = default;
};

/// Parameters of the 3-layer image prior, stored contiguously as
/// [w1 (H x G), b1 (H), w2 (N x H), b2 (N)] so the optimizer can treat them
/// as one flat vector.
class MlpParams {
public:
    MlpParams() = default;
    explicit MlpParams(MlpShape shape);
    MlpParams(MlpShape shape, std::vector<double> flat);

    const MlpShape& shape() const { return shape_; }
    std::span<double> flat() { return flat_; }
    std::span<const double> flat() const { return flat_; }

    std::span<const double> w1() const { return slice(0, shape_.hidden * shape_.inputs); }
    std::span<const double> b1() const { return slice(off_b1(), shape_.hidden); }
    std::span<const double> w2() const { return slice(off_w2(), shape_.outputs * shape_.hidden); }
    std::span<const double> b2() const { return slice(off_b2(), shape_.outputs); }
    std::span<double> w1() { return mslice(0, shape_.hidden * shape_.inputs); }
    std::span<double> b1() { return mslice(off_b1(), shape_.hidden); }
    std::span<double> w2() { return mslice(off_w2(), shape_.outputs * shape_.hidden); }
    std::span<double> b2() { return mslice(off_b2(), shape_.outputs); }

    bool operator==(const MlpParams&) const = default;

private:
    std::size_t off_b1() const { return shape_.hidden * shape_.inputs; }
    std::size_t off_w2() const { return off_b1() + shape_.hidden; }
    std::size_t off_b2() const { return off_w2() + shape_.outputs * shape_.hidden; }
    std::span<const double> slice(std::size_t o, std::size_t n) const { return {flat_.data() + o, n}; }
    std::span<double> mslice(std::size_t o, std::size_t n) { return {flat_.data() + o, n}; }

    MlpShape shape_;
    std::vector<double> flat_;
};

inline constexpr double kLeakySlope = 0.01;

/// Weights uniform on +-1/sqrt(fan_in), biases zero.
MlpParams init_params(std::size_t inputs, std::size_t hidden, std::size_t outputs, std::uint64_t seed);

/// Fixed network input, uniform on [0, 0.1].
std::vector<double> make_noise_input(std::size_t inputs, std::uint64_t seed);

/// Activations kept from a forward pass for the backward pass.
struct ForwardCache {
    std::vector<double> input;
    std::vector<double> hidden_pre;   // w1 rho + b1
    std::vector<double> hidden;       // LeakyReLU
    std::vector<double> output;       // Sigmoid(w2 hidden + b2), in (0, 1)
};

/// sigma = Sigmoid(w2 LeakyReLU(w1 rho + b1) + b2).
ForwardCache forward(const MlpParams& params, std::span<const double> rho);
void forward(const MlpParams& params, std::span<const double> rho, ForwardCache& cache);

/// Reverse-mode gradient of <dL_dsigma, sigma(theta)> with respect to the
/// flat parameter vector. The LeakyReLU derivative at 0 is taken as 1.
std::vector<double> backward(const MlpParams& params, const ForwardCache& cache,
                             std::span<const double> dL_dsigma);
void backward(const MlpParams& params, const ForwardCache& cache, std::span<const double> dL_dsigma,
              std::span<double> grad);

}  // namespace rsip
