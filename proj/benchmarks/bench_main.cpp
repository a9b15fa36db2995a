#include <benchmark/benchmark.h>

#include "qdm/cyclotomic.hpp"

namespace {

void BM_CyclotomicMul(benchmark::State& state) {
  const long m = state.range(0);
  auto a = qdm::CyclotomicNumber::zeta(m) + qdm::CyclotomicNumber::from_rational(m, qdm::Rational(3, 7));
  auto b = qdm::CyclotomicNumber::zeta(m, 3) - qdm::CyclotomicNumber::one(m);
  for (auto _ : state) {
    auto c = a * b;
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_CyclotomicMul)->Arg(8)->Arg(24);

void BM_CyclotomicInverse(benchmark::State& state) {
  const long m = state.range(0);
  auto a = qdm::CyclotomicNumber::zeta(m) + qdm::CyclotomicNumber::from_rational(m, qdm::Rational(3, 7));
  for (auto _ : state) {
    auto c = a.inverse();
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_CyclotomicInverse)->Arg(8)->Arg(24);

}  // namespace

BENCHMARK_MAIN();
