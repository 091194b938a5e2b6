// Serial reference GEMM against the OpenMP variant, plus one LSTM forecaster pass.

#include <benchmark/benchmark.h>

#include <vector>

#include "matsf/kernels.hpp"
#include "matsf/models.hpp"
#include "matsf/rng.hpp"

namespace {

std::vector<double> random_matrix(std::size_t n, std::uint64_t seed) {
  matsf::CounterRng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

template <auto Kernel>
void bm_gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n * n, 1);
  const auto b = random_matrix(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    std::fill(c.begin(), c.end(), 0.0);
    Kernel(n, n, n, a, b, c);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n * n));
}

BENCHMARK(bm_gemm<matsf::kernels::serial::gemm_nn>)->Name("gemm_nn/serial")->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(bm_gemm<matsf::kernels::parallel::gemm_nn>)->Name("gemm_nn/parallel")->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(bm_gemm<matsf::kernels::serial::gemm_nt>)->Name("gemm_nt/serial")->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(bm_gemm<matsf::kernels::parallel::gemm_nt>)->Name("gemm_nt/parallel")->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(bm_gemm<matsf::kernels::serial::gemm_tn>)->Name("gemm_tn/serial")->RangeMultiplier(2)->Range(32, 256);
BENCHMARK(bm_gemm<matsf::kernels::parallel::gemm_tn>)->Name("gemm_tn/parallel")->RangeMultiplier(2)->Range(32, 256);

void bm_forecaster_forward(benchmark::State& state) {
  matsf::ForecasterSpec spec;
  spec.input_size = 7;
  spec.hidden_sizes = {10, 10, 10};
  const auto model = matsf::init_forecaster(spec, 3);
  const std::size_t batch = 64, lookback = 24;
  const auto window = matsf::Tensor::from({batch, lookback, spec.input_size},
                                          random_matrix(batch * lookback * spec.input_size, 4));
  matsf::NoGradGuard no_grad;
  for (auto _ : state) benchmark::DoNotOptimize(matsf::forecaster_forward(model, window));
}
BENCHMARK(bm_forecaster_forward);

}  // namespace

BENCHMARK_MAIN();
