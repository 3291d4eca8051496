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

#include <random>

#include <benchmark/benchmark.h>

#include "pbench/stratify.hpp"
#include "pbench/synth.hpp"

using namespace pbench;

static void BM_KMeans(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lat(36, 47), lon(6, 19);
  std::vector<GeoPoint> pts(static_cast<std::size_t>(state.range(0)));
  for (auto& p : pts) p = {lat(rng), lon(rng)};
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(kmeans_fit(pts, {.k = 20, .seed = seed++}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KMeans)->Arg(1000)->Arg(16000)->Unit(benchmark::kMillisecond);

static void BM_SplitPlan(benchmark::State& state) {
  GeoDatasetParams p;
  p.sources_per_cluster = static_cast<int>(state.range(0));
  p.waveforms_per_source = 2;
  const auto g = gen_geo_dataset(p);
  const auto m = cluster_dataset(g.dataset, {.k = 20, .seed = 1});
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(build_split_plan(g.dataset, m, {.take_all = true}, seed++));
}
BENCHMARK(BM_SplitPlan)->Arg(50)->Arg(400)->Unit(benchmark::kMillisecond);
