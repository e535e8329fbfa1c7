#include <benchmark/benchmark.h>

#include "pkd/coherent_math.hpp"
#include "pkd/random_stream.hpp"
#include "pkd/session.hpp"
#include "pkd/toeplitz.hpp"

namespace {

pkd::BitString random_bits(std::size_t n, std::uint64_t seed) {
  pkd::RandomStream r(seed, pkd::StreamPurpose::test);
  return r.bit_string(n);
}

void BM_ToeplitzProduct(benchmark::State& state) {
  const auto s = static_cast<std::size_t>(state.range(0));
  const auto t = static_cast<std::size_t>(state.range(1));
  const pkd::toeplitz::ToeplitzSeed seed(random_bits(s + t - 1, 1), s, t);
  const pkd::BitString v = random_bits(s, 2);
  for (auto _ : state) benchmark::DoNotOptimize(pkd::toeplitz::toeplitz_product(seed, v));
}
BENCHMARK(BM_ToeplitzProduct)
    ->Args({64, 4096})
    ->Args({10'000, 150'000})
    ->Args({10'000, 1'500'000})
    ->Unit(benchmark::kMillisecond);

void BM_Compress(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto cols = static_cast<std::size_t>(state.range(1));
  const pkd::toeplitz::ToeplitzSeed seed(random_bits(rows + cols - 1, 3), rows, cols);
  const pkd::BitString v = random_bits(cols, 4);
  for (auto _ : state) benchmark::DoNotOptimize(pkd::toeplitz::compress(seed, v));
}
BENCHMARK(BM_Compress)
    ->Args({51, 140'000})
    ->Args({22'000, 140'000})
    ->Args({200'000, 1'400'000})
    ->Unit(benchmark::kMillisecond);

void BM_MinError(benchmark::State& state) {
  const auto m = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pkd::coherent::min_error_probability(0.1, m));
}
BENCHMARK(BM_MinError)->Arg(64)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_Session(benchmark::State& state) {
  pkd::session::SessionConfig cfg;
  cfg.N = static_cast<std::uint64_t>(state.range(0));
  cfg.master_seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(pkd::session::run_session(cfg));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * cfg.N));
}
BENCHMARK(BM_Session)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
