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

#include "pbench/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "pbench/error.hpp"
#include "pbench/parallel.hpp"

namespace pbench {

AggregateCounts& AggregateCounts::operator+=(const WaveformCounts& w) {
  if (w.kind == WaveformKind::earthquake) {
    tp += w.tp;
    fp += w.fp;
    fn += w.fn;
  } else {
    ++n_noise;
    tn_noise += w.fp == 0 ? 1 : 0;
  }
  return *this;
}

AggregateCounts accumulate(std::span<const WaveformCounts> per_waveform) {
  AggregateCounts c;
  for (const auto& w : per_waveform) c += w;
  return c;
}

std::optional<double> try_recall(const AggregateCounts& c) {
  if (c.tp + c.fn == 0) return std::nullopt;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

std::optional<double> try_f1(const AggregateCounts& c) {
  const auto denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

std::optional<double> try_noise_percent_correct(const AggregateCounts& c) {
  if (c.n_noise == 0) return std::nullopt;
  return static_cast<double>(c.tn_noise) / static_cast<double>(c.n_noise);
}

double recall(const AggregateCounts& c) {
  if (auto v = try_recall(c)) return *v;
  throw UndefinedMetricError("recall undefined: TP + FN = 0");
}

double f1(const AggregateCounts& c) {
  if (auto v = try_f1(c)) return *v;
  throw UndefinedMetricError("F1 undefined: 2TP + FP + FN = 0");
}

double noise_percent_correct(const AggregateCounts& c) {
  if (auto v = try_noise_percent_correct(c)) return *v;
  throw UndefinedMetricError("noise percent correct undefined: no noise waveforms");
}

std::vector<double> default_rmsr_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 60; ++k) grid.push_back(k / 200.0);
  return grid;
}

CumulativeRmsrCurve cumulative_rmsr(std::span<const double> residuals_s,
                                    std::span<const double> grid) {
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!(grid[j] > 0.0 && grid[j] <= kDefaultTpHalfWidthSeconds))
      throw ValidationError("cumulative_rmsr: grid point outside (0, 0.3]");
    if (j > 0 && !(grid[j] > grid[j - 1]))
      throw ValidationError("cumulative_rmsr: grid must be strictly ascending");
  }
  std::vector<double> mags;
  mags.reserve(residuals_s.size());
  for (double r : residuals_s) {
    if (!std::isfinite(r)) throw ValidationError("cumulative_rmsr: non-finite residual");
    mags.push_back(std::abs(r));
  }
  std::sort(mags.begin(), mags.end());

  CumulativeRmsrCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.values.assign(grid.size(), 0.0);
  curve.counts.assign(grid.size(), 0);
  double sum_sq = 0.0;
  std::size_t included = 0;
  double previous = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    while (included < mags.size() && mags[included] <= grid[j]) {
      sum_sq += mags[included] * mags[included];
      ++included;
    }
    curve.counts[j] = static_cast<std::int64_t>(included);
    if (included == 0) continue;
    double rms = std::sqrt(sum_sq / static_cast<double>(included));
    // Rounding guards: an RMS never exceeds its largest member and adding
    // larger members never lowers it.
    rms = std::min(rms, mags[included - 1]);
    rms = std::max(rms, previous);
    curve.values[j] = rms;
    previous = rms;
  }
  return curve;
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 99; ++k) grid.push_back(k / 100.0);
  return grid;
}

std::optional<double> threshold_objective(std::span<const LabeledTrace> validation,
                                          double threshold, double tp_half_width_s) {
  AggregateCounts counts;
  for (const auto& v : validation) counts += score_waveform(v.trace, v.record, threshold, tp_half_width_s);
  const auto f = try_f1(counts);
  const auto n = try_noise_percent_correct(counts);
  if (!f || !n) return std::nullopt;
  return 0.5 * (*f + *n);
}

ThresholdSelection select_threshold(std::span<const LabeledTrace> validation,
                                    std::span<const double> grid, double tp_half_width_s) {
  if (grid.empty()) throw ValidationError("select_threshold: empty grid");
  ThresholdSelection sel;
  sel.grid.assign(grid.begin(), grid.end());
  sel.objectives.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t g) {
    sel.objectives[g] = threshold_objective(validation, grid[g], tp_half_width_s);
  });
  std::optional<std::size_t> best;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!sel.objectives[g]) continue;
    if (!best || *sel.objectives[g] > *sel.objectives[*best]) best = g;
  }
  if (!best)
    throw UndefinedMetricError("select_threshold: objective undefined at every threshold");
  sel.threshold = grid[*best];
  sel.objective = *sel.objectives[*best];
  return sel;
}

}  // namespace pbench
