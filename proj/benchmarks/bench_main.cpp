#include "cmfact/eisenstein.hpp"
#include "cmfact/quaternion.hpp"

#include <benchmark/benchmark.h>

using namespace cmfact;

namespace {

const Setup& reference() {
  static const Setup s = make_setup(-43, -163, 2, 3).with_root_q(2);
  return s;
}

void BM_Factorize(benchmark::State& state) {
  const std::int64_t n = 3037000493LL * 3037000453LL;
  for (auto _ : state) benchmark::DoNotOptimize(factorize(n));
}
BENCHMARK(BM_Factorize);

void BM_RhsProduct(benchmark::State& state) {
  auto mode = state.range(0) ? RhsMode::Shimura4N : RhsMode::Modular4;
  for (auto _ : state) benchmark::DoNotOptimize(rhs_product(reference(), mode));
}
BENCHMARK(BM_RhsProduct)->Arg(0)->Arg(1);

void BM_IwasawaLog(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  PAdic x = PAdic::from_integer(Integer("123456789123456789"), 2, K);
  for (auto _ : state) benchmark::DoNotOptimize(iwasawa_log(x));
}
BENCHMARK(BM_IwasawaLog)->Arg(12)->Arg(32)->Arg(128);

void BM_EnumerateNorm(benchmark::State& state) {
  auto [alg, order] = build_algebra_and_order(3);
  const std::int64_t n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_norm(order, n));
  state.SetLabel("norm " + std::to_string(n));
}
BENCHMARK(BM_EnumerateNorm)->Arg(16)->Arg(256)->Arg(1024);

void BM_TraceSums(benchmark::State& state) {
  LocalEmbedding local(reference().d, 2, reference().root_p, 12);
  const std::int64_t t = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(trace_sums(reference(), local, t));
}
BENCHMARK(BM_TraceSums)->Arg(1)->Arg(16)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_IdentityCheck(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(identity_check(reference(), 5, 12, 1));
}
BENCHMARK(BM_IdentityCheck)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
