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

#ifndef PBENCH_PICKER_EVAL_HPP_
#define PBENCH_PICKER_EVAL_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pbench/dataset.hpp"

namespace pbench {

inline constexpr double kDefaultTpHalfWidthSeconds = 0.3;
inline constexpr std::int64_t kDefaultWindowSamples = 3001;  // 30 s at 100 Hz
inline constexpr std::int64_t kDefaultStrideSamples = 200;   // 28 s overlap

// One model forward pass over a slice of a waveform.
struct WindowOutput {
  std::string waveform_id;
  std::int64_t window_start_index = 0;
  std::vector<double> probabilities;  // P-arrival probability per sample
  bool operator==(const WindowOutput&) const = default;
};

// Per-sample P probabilities for a whole waveform. Samples with coverage 0
// were never inside a window; they are undefined and never picked.
struct ProbabilityTrace {
  std::string waveform_id;
  std::vector<double> values;
  std::vector<int> coverage;

  std::size_t size() const { return values.size(); }
  bool defined(std::size_t i) const { return coverage[i] > 0; }
  // Fully defined trace (coverage 1 everywhere).
  static ProbabilityTrace from_values(std::string waveform_id, std::vector<double> values);
};

// Mean of all windows covering each sample. Windows must share a waveform id
// and a length, fit inside [0, n_samples), and hold probabilities in [0, 1].
ProbabilityTrace aggregate_windows(std::span<const WindowOutput> windows, std::int64_t n_samples);

// Window start offsets with no end-padding: 0, stride, ... while the window fits.
std::vector<std::int64_t> window_offsets(std::int64_t n_samples, std::int64_t window_samples,
                                         std::int64_t stride_samples);

enum class PickClass { unclassified, true_positive, false_positive };

std::string_view to_string(PickClass c);

struct Pick {
  std::string waveform_id;
  std::int64_t sample_index = 0;
  double probability = 0.0;
  PickClass classification = PickClass::unclassified;
  std::optional<double> residual_s;  // true positives only: predicted - labeled
  bool operator==(const Pick&) const = default;
};

// One pick per maximal run of defined samples strictly above `threshold`,
// placed at the run's argmax (earliest on ties). Ordered by sample index.
std::vector<Pick> extract_picks(const ProbabilityTrace& trace, double threshold);

struct WaveformCounts {
  std::string waveform_id;
  WaveformKind kind = WaveformKind::earthquake;
  int tp = 0;
  int fp = 0;
  int fn = 0;
  std::vector<double> residuals_s;
  std::vector<Pick> picks;  // classified copies of the input picks

  bool clean() const { return kind == WaveformKind::noise && fp == 0; }
};

// Picks within +/- tp_half_width_s of the label are candidates; the one
// nearest the label (earliest on ties) is the single true positive, every
// other pick is a false positive, and FN = 1 when there is no true positive.
WaveformCounts classify_picks(std::span<const Pick> picks, std::int64_t labeled_p_index,
                              double sampling_rate_hz,
                              double tp_half_width_s = kDefaultTpHalfWidthSeconds);

// Every pick on a noise waveform is a false positive.
WaveformCounts classify_noise(std::span<const Pick> picks);

// extract_picks followed by classify_picks/classify_noise according to the
// waveform kind.
WaveformCounts score_waveform(const ProbabilityTrace& trace, const WaveformRecord& record,
                              double threshold,
                              double tp_half_width_s = kDefaultTpHalfWidthSeconds);

// Newline-delimited JSON {waveform_id, window_start_index, probabilities}.
std::vector<WindowOutput> parse_window_outputs(std::istream& in);
std::vector<WindowOutput> load_window_outputs(const std::filesystem::path& path);
void write_window_outputs(std::ostream& out, std::span<const WindowOutput> windows);
void save_window_outputs(const std::filesystem::path& path, std::span<const WindowOutput> windows);

// Groups windows by waveform id (ids sorted; windows keep file order).
std::vector<std::pair<std::string, std::vector<WindowOutput>>> group_by_waveform(
    std::vector<WindowOutput> windows);

}  // namespace pbench

#endif  // PBENCH_PICKER_EVAL_HPP_
