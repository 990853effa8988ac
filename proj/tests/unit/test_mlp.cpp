#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rsip/errors.hpp"
#include "rsip/mlp.hpp"

using namespace rsip;

namespace {

// Straight-line evaluation with plain loops and no shared code.
std::vector<double> reference_forward(const MlpParams& p, const std::vector<double>& rho) {
    const auto s = p.shape();
    const auto f = p.flat();
    std::vector<double> hidden(s.hidden);
    for (std::size_t h = 0; h < s.hidden; ++h) {
        double z = f[s.hidden * s.inputs + h];
        for (std::size_t g = 0; g < s.inputs; ++g) z += f[h * s.inputs + g] * rho[g];
        hidden[h] = z > 0 ? z : 0.01 * z;
    }
    const std::size_t w2 = s.hidden * s.inputs + s.hidden;
    const std::size_t b2 = w2 + s.outputs * s.hidden;
    std::vector<double> out(s.outputs);
    for (std::size_t n = 0; n < s.outputs; ++n) {
        double z = f[b2 + n];
        for (std::size_t h = 0; h < s.hidden; ++h) z += f[w2 + n * s.hidden + h] * hidden[h];
        out[n] = 1.0 / (1.0 + std::exp(-z));
    }
    return out;
}

// Random parameters with biases turned on, so every code path is exercised.
MlpParams random_params(MlpShape s, std::uint64_t seed, double scale = 1.0) {
    return MlpParams(s, testing::uniform_vector(s.parameter_count(), -scale, scale, seed));
}

double contracted_output(const MlpParams& shape_src, std::span<const double> theta, const std::vector<double>& rho,
                         const std::vector<double>& c) {
    MlpParams p(shape_src.shape(), std::vector<double>(theta.begin(), theta.end()));
    const auto cache = forward(p, rho);
    double s = 0.0;
    for (std::size_t n = 0; n < c.size(); ++n) s += c[n] * cache.output[n];
    return s;
}

}  // namespace

TEST_CASE("parameter counts and initialization") {
    const MlpShape full_size{328, 2000, 3228};
    CHECK(full_size.parameter_count() == 328u * 2000u + 2000u + 3228u * 2000u + 3228u);
    CHECK(init_params(1, 1, 1, 4).flat().size() == 4);

    const auto a = init_params(7, 9, 5, 42);
    const auto b = init_params(7, 9, 5, 42);
    const auto c = init_params(7, 9, 5, 43);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    for (double w : a.w1()) CHECK(std::abs(w) <= 1.0 / std::sqrt(7.0));
    for (double w : a.w2()) CHECK(std::abs(w) <= 1.0 / std::sqrt(9.0));
    for (double x : a.b1()) CHECK(x == 0.0);
    for (double x : a.b2()) CHECK(x == 0.0);
    CHECK_THROWS_AS(init_params(0, 1, 1, 0), InvalidArgument);

    const auto rho = make_noise_input(1000, 3);
    for (double x : rho) {
        CHECK(x >= 0.0);
        CHECK(x <= 0.1);
    }
    CHECK(rho == make_noise_input(1000, 3));
}

TEST_CASE("forward values") {
    const MlpParams zero({4, 6, 3});
    for (double o : forward(zero, std::vector<double>{1, 2, 3, 4}).output) CHECK(o == 0.5);

    MlpParams tiny({1, 1, 1});
    tiny.w2()[0] = 123.0;
    CHECK(forward(tiny, std::vector<double>{0.7}).output[0] == 0.5);

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto p = random_params({6, 8, 5}, seed);
        const auto rho = testing::uniform_vector(6, -1, 1, 100 + seed);
        const auto got = forward(p, rho).output;
        const auto want = reference_forward(p, rho);
        for (std::size_t n = 0; n < got.size(); ++n) CHECK(std::abs(got[n] - want[n]) <= 1e-14);
    }

    // saturated pre-activations still land strictly inside (0, 1)
    const auto big = random_params({3, 4, 6}, 9, 1e3);
    for (double o : forward(big, std::vector<double>{1, -1, 1}).output) {
        CHECK(o > 0.0);
        CHECK(o < 1.0);
    }
    CHECK_THROWS_AS(forward(zero, std::vector<double>{1, 2}), InvalidArgument);
}

TEST_CASE("forward and backward are deterministic") {
    const auto p = init_params(50, 300, 400, 1);
    const auto rho = make_noise_input(50, 1);
    const auto a = forward(p, rho);
    const auto b = forward(p, rho);
    CHECK(testing::bitwise_equal(a.output, b.output));
    const auto dl = testing::uniform_vector(400, -1, 1, 2);
    CHECK(testing::bitwise_equal(backward(p, a, dl), backward(p, b, dl)));
}

TEST_CASE("backward matches central differences") {
    struct Case {
        MlpShape shape;
        std::uint64_t seed;
    };
    const Case cases[] = {{{2, 2, 2}, 1}, {{2, 2, 2}, 2}, {{3, 5, 4}, 3}, {{10, 20, 10}, 4}, {{10, 20, 10}, 5}};
    for (const auto& c : cases) {
        const auto p = random_params(c.shape, c.seed);
        const auto rho = testing::uniform_vector(c.shape.inputs, -1, 1, c.seed + 10);
        const auto weights = testing::uniform_vector(c.shape.outputs, -1, 1, c.seed + 20);
        const auto analytic = backward(p, forward(p, rho), weights);
        const std::vector<double> theta(p.flat().begin(), p.flat().end());
        const auto fd = testing::central_difference(
            [&](std::span<const double> t) { return contracted_output(p, t, rho, weights); }, theta, 1e-6);
        CHECK(testing::gradient_relative_error(analytic, fd) <= 1e-5);
    }
}

TEST_CASE("backward linearity and edge cases") {
    const auto p = random_params({4, 7, 5}, 8);
    const auto cache = forward(p, testing::uniform_vector(4, -1, 1, 9));
    for (double g : backward(p, cache, std::vector<double>(5, 0.0))) CHECK(g == 0.0);

    const auto dl = testing::uniform_vector(5, -1, 1, 10);
    auto dl2 = dl;
    for (double& x : dl2) x *= 2.0;
    const auto g1 = backward(p, cache, dl);
    const auto g2 = backward(p, cache, dl2);
    for (std::size_t k = 0; k < g1.size(); ++k) CHECK(g2[k] == 2.0 * g1[k]);

    // zero first layer puts every hidden pre-activation at exactly 0, where
    // the LeakyReLU derivative is taken as 1
    MlpParams q({3, 2, 2});
    q.w2()[0] = 0.5;
    q.w2()[1] = -1.5;
    q.w2()[2] = 2.0;
    q.w2()[3] = 0.25;
    const auto cq = forward(q, std::vector<double>{0.1, 0.2, 0.3});
    const std::vector<double> dq{1.0, -2.0};
    const auto gq = backward(q, cq, dq);
    const double s = 0.25;  // sigma (1 - sigma) at sigma = 0.5
    const std::vector<double> want_b1{0.5 * dq[0] * s + 2.0 * dq[1] * s, -1.5 * dq[0] * s + 0.25 * dq[1] * s};
    const auto b1 = std::span<const double>(gq).subspan(6, 2);
    CHECK(b1[0] == doctest::Approx(want_b1[0]).epsilon(1e-15));
    CHECK(b1[1] == doctest::Approx(want_b1[1]).epsilon(1e-15));
}
