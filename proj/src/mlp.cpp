#include "rsip/mlp.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "rsip/errors.hpp"
#include "rsip/kernels.hpp"

namespace rsip {

MlpParams::MlpParams(MlpShape shape) : shape_(shape), flat_(shape.parameter_count(), 0.0) {}

MlpParams::MlpParams(MlpShape shape, std::vector<double> flat) : shape_(shape), flat_(std::move(flat)) {
    if (flat_.size() != shape_.parameter_count()) {
        throw InvalidArgument("mlp: expected " + std::to_string(shape_.parameter_count()) +
                              " parameters, got " + std::to_string(flat_.size()));
    }
}

MlpParams init_params(std::size_t inputs, std::size_t hidden, std::size_t outputs, std::uint64_t seed) {
    if (inputs == 0 || hidden == 0 || outputs == 0) throw InvalidArgument("mlp: layer sizes must be >= 1");
    MlpParams p({inputs, hidden, outputs});
    std::mt19937_64 rng(seed);
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(inputs));
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    std::uniform_real_distribution<double> u1(-bound1, bound1);
    std::uniform_real_distribution<double> u2(-bound2, bound2);
    for (double& w : p.w1()) w = u1(rng);
    for (double& w : p.w2()) w = u2(rng);
    return p;
}

std::vector<double> make_noise_input(std::size_t inputs, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(0.0, 0.1);
    std::vector<double> rho(inputs);
    for (double& x : rho) x = u(rng);
    return rho;
}

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

void forward(const MlpParams& params, std::span<const double> rho, ForwardCache& cache) {
    const MlpShape& s = params.shape();
    if (rho.size() != s.inputs) throw InvalidArgument("mlp forward: input length mismatch");
    cache.input.assign(rho.begin(), rho.end());
    cache.hidden_pre.resize(s.hidden);
    cache.hidden.resize(s.hidden);
    cache.output.resize(s.outputs);

    kernels::parallel::gemv({params.w1().data(), s.hidden, s.inputs}, rho, params.b1(), cache.hidden_pre);
    for (std::size_t h = 0; h < s.hidden; ++h) {
        const double z = cache.hidden_pre[h];
        cache.hidden[h] = z >= 0.0 ? z : kLeakySlope * z;
    }
    kernels::parallel::gemv({params.w2().data(), s.outputs, s.hidden}, cache.hidden, params.b2(), cache.output);
    for (double& o : cache.output) {
        o = sigmoid(o);
        // keep the open interval even when exp saturates
        if (o <= 0.0) o = std::numeric_limits<double>::min();
        if (o >= 1.0) o = std::nextafter(1.0, 0.0);
    }
}

ForwardCache forward(const MlpParams& params, std::span<const double> rho) {
    ForwardCache cache;
    forward(params, rho, cache);
    return cache;
}

void backward(const MlpParams& params, const ForwardCache& cache, std::span<const double> dL_dsigma,
              std::span<double> grad) {
    const MlpShape& s = params.shape();
    if (dL_dsigma.size() != s.outputs) throw InvalidArgument("mlp backward: gradient length mismatch");
    if (grad.size() != s.parameter_count()) throw InvalidArgument("mlp backward: output length mismatch");
    if (cache.output.size() != s.outputs || cache.hidden.size() != s.hidden) {
        throw InvalidArgument("mlp backward: cache does not match parameters");
    }

    const std::size_t off_b1 = s.hidden * s.inputs;
    const std::size_t off_w2 = off_b1 + s.hidden;
    const std::size_t off_b2 = off_w2 + s.outputs * s.hidden;

    // output layer: d/dz2 = dL/dsigma * sigma (1 - sigma)
    std::span<double> g_out = grad.subspan(off_b2, s.outputs);
    for (std::size_t n = 0; n < s.outputs; ++n) {
        const double o = cache.output[n];
        g_out[n] = dL_dsigma[n] * o * (1.0 - o);
    }
    kernels::parallel::outer(g_out, cache.hidden, grad.subspan(off_w2, s.outputs * s.hidden));

    std::span<double> g_hidden = grad.subspan(off_b1, s.hidden);
    kernels::parallel::gemv_t({params.w2().data(), s.outputs, s.hidden}, g_out, g_hidden);
    for (std::size_t h = 0; h < s.hidden; ++h) {
        if (cache.hidden_pre[h] < 0.0) g_hidden[h] *= kLeakySlope;
    }
    kernels::parallel::outer(g_hidden, cache.input, grad.subspan(0, off_b1));
}

std::vector<double> backward(const MlpParams& params, const ForwardCache& cache,
                             std::span<const double> dL_dsigma) {
    std::vector<double> grad(params.shape().parameter_count());
    backward(params, cache, dL_dsigma, grad);
    return grad;
}

}  // namespace rsip
