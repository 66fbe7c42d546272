// Copyright 2026 The qht Authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "qht/discrete_qho.hpp"
#include "qht/fast_forward.hpp"
#include "qht/hermite_sampling.hpp"
#include "qht/qht_pipeline.hpp"
#include "qht/spectral_core.hpp"

namespace {

using namespace qht;

CVec random_state(int M) {
  Rng rng(11);
  CVec v(M);
  for (int i = 0; i < M; ++i) v[i] = cplx(rng.normal(), rng.normal());
  return v / v.norm();
}

void BM_CenteredDft(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const auto q = DiscreteQHO::build(M);
  const CVec v = random_state(M);
  for (auto _ : state) benchmark::DoNotOptimize(q.dft().forward(v));
  state.SetComplexityN(M);
}
BENCHMARK(BM_CenteredDft)->RangeMultiplier(4)->Range(256, 1 << 16)->Complexity();

void BM_ApplyFactored(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const auto q = DiscreteQHO::build(M);
  const auto fe = decompose(state.range(1) ? 3.0 : 1.0);
  const CVec v = random_state(M);
  for (auto _ : state) benchmark::DoNotOptimize(apply_factored(q, fe, v));
}
BENCHMARK(BM_ApplyFactored)->ArgsProduct({{1024, 16384}, {0, 1}});

void BM_EigenstateFilter(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const auto q = DiscreteQHO::build(M);
  const CVec v = build_pr_state(4, M).normalized();
  for (auto _ : state) benchmark::DoNotOptimize(eigenstate_filter(q, v, 4));
}
BENCHMARK(BM_EigenstateFilter)->Arg(256)->Arg(1024)->Arg(4096);

void BM_HermiteTable(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const auto spec = GridSpec::make(M);
  for (auto _ : state) benchmark::DoNotOptimize(hermite_table(M / 8, spec));
}
BENCHMARK(BM_HermiteTable)->Arg(256)->Arg(1024)->Arg(4096);

void BM_SamplerBuild(benchmark::State& state) {
  const auto f = make_planted(parse_planted("hermite_sum n=2 terms=1.0:0.8;0.1:0.6"));
  SamplerConfig sc;
  sc.M = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(HermiteSampler(f, sc).kappa());
}
BENCHMARK(BM_SamplerBuild)->Arg(128)->Arg(256);

void BM_SamplerDraw(benchmark::State& state) {
  const auto f = make_planted(parse_planted("hermite_sum n=2 terms=1.0:0.8;0.1:0.6"));
  const HermiteSampler s(f, SamplerConfig{});
  Rng rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(s.sample_postselected(rng));
}
BENCHMARK(BM_SamplerDraw);

}  // namespace

BENCHMARK_MAIN();
