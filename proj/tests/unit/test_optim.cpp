#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "rsip/errors.hpp"
#include "rsip/io.hpp"
#include "rsip/optim.hpp"

using namespace rsip;

TEST_CASE("zero gradient leaves parameters unchanged") {
    auto state = AdamState::zeros(5, 1e-2);
    std::vector<double> p{1, -2, 3, 0, 5};
    const auto before = p;
    adam_step(state, p, std::vector<double>(5, 0.0));
    CHECK(p == before);
    CHECK(state.step_count == 1);
}

TEST_CASE("first step of a unit gradient moves by lr") {
    const double lr = 1e-3;
    auto state = AdamState::zeros(1, lr);
    std::vector<double> p{0.0};
    adam_step(state, p, std::vector<double>{1.0});
    // m_hat = 1, v_hat = 1, so the step is lr / (1 + eps)
    CHECK(std::abs(p[0] - (-lr / (1.0 + 1e-8))) <= 1e-6 * lr);

    double prev = p[0];
    for (int t = 0; t < 10; ++t) {
        adam_step(state, p, std::vector<double>{1.0});
        CHECK(std::abs((p[0] - prev) + lr) <= 1e-6 * lr);
        prev = p[0];
    }
}

TEST_CASE("first step is bounded by lr") {
    const double lr = 0.05;
    auto state = AdamState::zeros(1000, lr);
    std::vector<double> p(1000, 0.0);
    const auto g = testing::uniform_vector(1000, -100, 100, 3);
    adam_step(state, p, g);
    for (double x : p) CHECK(std::abs(x) <= lr * (1 + 1e-12));
    for (double v : state.v) CHECK(v >= 0.0);
}

TEST_CASE("trajectories are deterministic") {
    auto run = [] {
        auto state = AdamState::zeros(300, 1e-2);
        auto p = testing::uniform_vector(300, -1, 1, 4);
        for (int t = 0; t < 50; ++t) {
            std::vector<double> g(p.size());
            for (std::size_t k = 0; k < p.size(); ++k) g[k] = 2.0 * (p[k] - 0.3) + std::sin(p[k]);
            adam_step(state, p, g);
        }
        return std::make_pair(p, state);
    };
    const auto a = run();
    const auto b = run();
    CHECK(testing::bitwise_equal(a.first, b.first));
    CHECK(a.second == b.second);
}

TEST_CASE("adam errors") {
    auto state = AdamState::zeros(2, 1e-2);
    std::vector<double> p{0, 0};
    CHECK_THROWS_AS(adam_step(state, p, std::vector<double>{1.0, std::nan("")}), NumericalError);
    CHECK_THROWS_AS(adam_step(state, p, std::vector<double>{1.0, INFINITY}), NumericalError);
    CHECK_THROWS_AS(adam_step(state, p, std::vector<double>{1.0}), InvalidArgument);
}

TEST_CASE("state survives serialization") {
    auto state = AdamState::zeros(20, 3e-4);
    auto p = testing::uniform_vector(20, -1, 1, 6);
    for (int t = 0; t < 7; ++t) adam_step(state, p, testing::uniform_vector(20, -1, 1, 100 + t));
    const auto back = io::decode_adam(io::encode_adam(state));
    CHECK(back == state);
}
