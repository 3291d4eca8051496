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

#include "pbench/ranksim.hpp"

using namespace pbench;

namespace {

std::vector<ScoreMatrix> sets(int models, int inits, int count) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<ScoreMatrix> out;
  for (int d = 0; d < count; ++d) {
    ScoreMatrix s{models, inits, {}};
    for (int k = 0; k < models * inits; ++k) s.values.push_back(u(rng));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

static void BM_RankExact(benchmark::State& state) {
  const auto s = sets(static_cast<int>(state.range(0)), 4, 12);
  for (auto _ : state) benchmark::DoNotOptimize(rank_probabilities(s, Direction::higher_is_better));
}
BENCHMARK(BM_RankExact)->Arg(3)->Arg(6)->Unit(benchmark::kMicrosecond);

static void BM_RankMonteCarlo(benchmark::State& state) {
  const auto s = sets(12, 4, 12);
  RankOptions o;
  o.monte_carlo_draws = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rank_probabilities(s, Direction::higher_is_better, o));
}
BENCHMARK(BM_RankMonteCarlo)->Arg(100000)->Unit(benchmark::kMillisecond);
