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

#include "pbench/metrics.hpp"
#include "pbench/picker_eval.hpp"
#include "pbench/synth.hpp"

using namespace pbench;

namespace {

WaveformRecord quake() {
  WaveformRecord w;
  w.waveform_id = "w";
  w.source_id = "s";
  w.p_arrival_index = 2000;
  w.n_samples = 6000;
  return w;
}

}  // namespace

static void BM_AggregateWindows(benchmark::State& state) {
  SynthTraceParams p;
  p.false_bump_rate = 1.0;
  const auto windows = gen_window_outputs(gen_trace(quake(), p));
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_windows(windows, 6000));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(windows.size()) * kDefaultWindowSamples);
}
BENCHMARK(BM_AggregateWindows);

static void BM_ScoreWaveform(benchmark::State& state) {
  SynthTraceParams p;
  p.false_bump_rate = 2.0;
  const auto w = quake();
  const auto t = gen_trace(w, p);
  for (auto _ : state) benchmark::DoNotOptimize(score_waveform(t, w, 0.3));
}
BENCHMARK(BM_ScoreWaveform);

static void BM_SelectThreshold(benchmark::State& state) {
  SynthTraceParams p;
  p.false_bump_rate = 0.5;
  p.pick_error_sd_s = 0.1;
  std::vector<LabeledTrace> v;
  for (int k = 0; k < state.range(0); ++k) {
    WaveformRecord w = quake();
    w.waveform_id = "w" + std::to_string(k);
    if (k % 9 == 0) {
      w.kind = WaveformKind::noise;
      w.source_id.reset();
      w.p_arrival_index.reset();
    }
    v.push_back({gen_trace(w, p), w});
  }
  const auto grid = default_threshold_grid();
  for (auto _ : state) benchmark::DoNotOptimize(select_threshold(v, grid));
}
BENCHMARK(BM_SelectThreshold)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_CumulativeRmsr(benchmark::State& state) {
  std::vector<double> r;
  for (int k = 0; k < state.range(0); ++k) r.push_back(0.3 * ((k * 7919) % 1000) / 1000.0 - 0.15);
  const auto grid = default_rmsr_grid();
  for (auto _ : state) benchmark::DoNotOptimize(cumulative_rmsr(r, grid));
}
BENCHMARK(BM_CumulativeRmsr)->Arg(10000);
