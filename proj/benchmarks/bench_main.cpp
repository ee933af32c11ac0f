#include "hitsm/model_io.hpp"
#include "hitsm/oracle.hpp"
#include "support/models.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace hitsm;

namespace {

std::vector<SemiMarkovModel> random_models(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::vector<SemiMarkovModel> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(testsupport::random_model(g));
  return out;
}

void BM_ComparableArithmetic(benchmark::State& st) {
  using testsupport::cf;
  ComparableFn a = (cf(1) - cf(Rational(1, 2), 1)) / (cf(1) + cf(2, Rational(1, 2)));
  ComparableFn b = cf(3, 2) / (cf(1, 1) + cf(1, 2));
  for (auto _ : st) {
    ComparableFn c = a * b + a / (a + b);
    benchmark::DoNotOptimize(cf_limit(c));
  }
}
BENCHMARK(BM_ComparableArithmetic);

void BM_Canonicalize(benchmark::State& st) {
  using testsupport::cf;
  ComparableFn f = cf(1);
  for (int k = 1; k <= st.range(0); ++k) f = f * (cf(1) + cf(k, Rational(k, 2))) / (cf(1) + cf(1, k));
  for (auto _ : st) benchmark::DoNotOptimize(canonicalize(f));
}
BENCHMARK(BM_Canonicalize)->Arg(2)->Arg(4)->Arg(8);

void BM_ReduceWorkedExample(benchmark::State& st) {
  auto m = testsupport::three_state(1, 0, 0);
  for (auto _ : st) benchmark::DoNotOptimize(analyze(reduce(m), m));
}
BENCHMARK(BM_ReduceWorkedExample);

void BM_ReduceRandom(benchmark::State& st) {
  auto models = random_models(32, 17);
  std::size_t k = 0;
  for (auto _ : st) {
    const auto& m = models[k++ % models.size()];
    benchmark::DoNotOptimize(analyze(reduce(m), m));
  }
}
BENCHMARK(BM_ReduceRandom);

void BM_ExactLaplace(benchmark::State& st) {
  auto m = testsupport::three_state(1, 0, 0);
  auto f = fix_eps(m, Real("1e-3"));
  for (auto _ : st) benchmark::DoNotOptimize(exact_laplace(f, Real(1)));
}
BENCHMARK(BM_ExactLaplace);

void BM_ConvergenceCheck(benchmark::State& st) {
  auto m = testsupport::three_state(1, 0, 0);
  auto r = analyze(reduce(m), m);
  for (auto _ : st) benchmark::DoNotOptimize(convergence_check(m, r, {1e-2, 1e-3, 1e-4}, {0.5, 1, 2}));
}
BENCHMARK(BM_ConvergenceCheck)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& st) {
  auto m = testsupport::three_state(1, 0, 0);
  const auto n = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(simulate_hitting(m, 1e-3, 1, n, 1, 1));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * n));
}
BENCHMARK(BM_Simulate)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SerializeRoundTrip(benchmark::State& st) {
  auto models = random_models(8, 3);
  std::size_t k = 0;
  for (auto _ : st) benchmark::DoNotOptimize(parse_model(serialize_model(models[k++ % models.size()])));
}
BENCHMARK(BM_SerializeRoundTrip);

}  // namespace

BENCHMARK_MAIN();
