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

#ifndef PBENCH_METRICS_HPP_
#define PBENCH_METRICS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pbench/picker_eval.hpp"

namespace pbench {

struct AggregateCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn_noise = 0;  // noise waveforms with no picks
  std::int64_t n_noise = 0;

  AggregateCounts& operator+=(const WaveformCounts& w);
  bool operator==(const AggregateCounts&) const = default;
};

AggregateCounts accumulate(std::span<const WaveformCounts> per_waveform);

// Throw UndefinedMetricError when the denominator is zero.
double recall(const AggregateCounts& c);
double f1(const AggregateCounts& c);
double noise_percent_correct(const AggregateCounts& c);

// Masked variants for tables: nullopt instead of throwing.
std::optional<double> try_recall(const AggregateCounts& c);
std::optional<double> try_f1(const AggregateCounts& c);
std::optional<double> try_noise_percent_correct(const AggregateCounts& c);

struct CumulativeRmsrCurve {
  std::vector<double> grid;    // cutoffs, seconds
  std::vector<double> values;  // RMS of residuals with |r| <= cutoff; 0 where masked
  std::vector<std::int64_t> counts;

  bool masked(std::size_t j) const { return counts[j] == 0; }
};

// 0.005, 0.010, ..., 0.300 s.
std::vector<double> default_rmsr_grid();

// Grid must be strictly ascending within (0, 0.3].
CumulativeRmsrCurve cumulative_rmsr(std::span<const double> residuals_s,
                                    std::span<const double> grid);

// 0.01, 0.02, ..., 0.99.
std::vector<double> default_threshold_grid();

// One validation waveform: its aggregated trace plus the record it came from.
struct LabeledTrace {
  ProbabilityTrace trace;
  WaveformRecord record;
};

struct ThresholdSelection {
  double threshold = 0.0;
  double objective = 0.0;                      // mean(F1, noise % correct)
  std::vector<double> grid;
  std::vector<std::optional<double>> objectives;  // per grid point
};

// Mean of F1 and noise percent correct at a threshold; nullopt when either is
// undefined.
std::optional<double> threshold_objective(std::span<const LabeledTrace> validation,
                                          double threshold,
                                          double tp_half_width_s = kDefaultTpHalfWidthSeconds);

// Scans the grid and returns the lowest threshold attaining the maximum
// objective. Throws when no grid point has a defined objective.
ThresholdSelection select_threshold(std::span<const LabeledTrace> validation,
                                    std::span<const double> grid,
                                    double tp_half_width_s = kDefaultTpHalfWidthSeconds);

}  // namespace pbench

#endif  // PBENCH_METRICS_HPP_
