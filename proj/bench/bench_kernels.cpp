// Serial reference kernels against their OpenMP counterparts.
// Thread count follows EIT_RSIP_THREADS (or the OpenMP default).

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rsip/kernels.hpp"

namespace {

using namespace rsip::kernels;

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

// Shapes: (rows, cols) of the second MLP layer, N cells by H hidden units.
void shapes(benchmark::internal::Benchmark* b) {
    b->Args({3228, 256})->Args({4000, 256})->Args({3228, 2000});
}

template <bool Parallel>
void bm_gemv(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const auto cols = static_cast<std::size_t>(state.range(1));
    const auto a = random_vector(rows * cols, 1);
    const auto x = random_vector(cols, 2);
    const auto bias = random_vector(rows, 3);
    std::vector<double> y(rows);
    for (auto _ : state) {
        if constexpr (Parallel) {
            parallel::gemv({a.data(), rows, cols}, x, bias, y);
        } else {
            serial::gemv({a.data(), rows, cols}, x, bias, y);
        }
        benchmark::DoNotOptimize(y.data());
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * rows * cols * sizeof(double)));
}

template <bool Parallel>
void bm_gemv_t(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const auto cols = static_cast<std::size_t>(state.range(1));
    const auto a = random_vector(rows * cols, 1);
    const auto x = random_vector(rows, 2);
    std::vector<double> y(cols);
    for (auto _ : state) {
        if constexpr (Parallel) {
            parallel::gemv_t({a.data(), rows, cols}, x, y);
        } else {
            serial::gemv_t({a.data(), rows, cols}, x, y);
        }
        benchmark::DoNotOptimize(y.data());
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * rows * cols * sizeof(double)));
}

template <bool Parallel>
void bm_outer(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    const auto cols = static_cast<std::size_t>(state.range(1));
    const auto u = random_vector(rows, 1);
    const auto v = random_vector(cols, 2);
    std::vector<double> out(rows * cols);
    for (auto _ : state) {
        if constexpr (Parallel) {
            parallel::outer(u, v, out);
        } else {
            serial::outer(u, v, out);
        }
        benchmark::DoNotOptimize(out.data());
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * rows * cols * sizeof(double)));
}

template <bool Parallel>
void bm_adam(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0) * state.range(1));
    auto params = random_vector(n, 1);
    const auto grad = random_vector(n, 2);
    std::vector<double> m(n, 0.0), v(n, 0.0);
    const AdamStepCoefficients c{0.9, 0.999, 1e-4 / (1 - 0.9), 1.0 / (1 - 0.999), 1e-8};
    for (auto _ : state) {
        if constexpr (Parallel) {
            parallel::adam_update(params, grad, m, v, c);
        } else {
            serial::adam_update(params, grad, m, v, c);
        }
        benchmark::DoNotOptimize(params.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

}  // namespace

BENCHMARK(bm_gemv<false>)->Name("gemv/serial")->Apply(shapes);
BENCHMARK(bm_gemv<true>)->Name("gemv/parallel")->Apply(shapes);
BENCHMARK(bm_gemv_t<false>)->Name("gemv_t/serial")->Apply(shapes);
BENCHMARK(bm_gemv_t<true>)->Name("gemv_t/parallel")->Apply(shapes);
BENCHMARK(bm_outer<false>)->Name("outer/serial")->Apply(shapes);
BENCHMARK(bm_outer<true>)->Name("outer/parallel")->Apply(shapes);
BENCHMARK(bm_adam<false>)->Name("adam_update/serial")->Apply(shapes);
BENCHMARK(bm_adam<true>)->Name("adam_update/parallel")->Apply(shapes);

int main(int argc, char** argv) {
    rsip::kernels::configure_threads_from_env();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
