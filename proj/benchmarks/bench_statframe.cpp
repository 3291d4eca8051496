/*
 * Copyright 2026 The picker-bench Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include "pbench/rng.hpp"
#include "pbench/statframe.hpp"
#include "pbench/synth.hpp"

using namespace pbench;

static void BM_FitDefaultDesign(benchmark::State& state) {
  MetricModelParams p;
  p.grand_mean = 0.8;
  p.model_effects = {0.02, -0.02, 0.0};
  p.quantity_effects = {-0.05, -0.025, 0.0, 0.025, 0.05};
  p.var_data = {4e-4};
  p.var_train = {1e-4};
  const auto t = gen_metrics("recall", DesignSpec{}, p, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fit(t));
}
BENCHMARK(BM_FitDefaultDesign)->Unit(benchmark::kMicrosecond);

static void BM_VarianceComponents(benchmark::State& state) {
  Rng rng(2);
  std::vector<double> v(48);
  for (auto& x : v) x = standard_normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(variance_components(v, 12, 4));
}
BENCHMARK(BM_VarianceComponents);

static void BM_QQData(benchmark::State& state) {
  Rng rng(3);
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (auto& x : v) x = standard_normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(qq_data(v));
}
BENCHMARK(BM_QQData)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
