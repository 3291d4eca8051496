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

#include "pbench/picker_eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "pbench/atomic_file.hpp"
#include "pbench/error.hpp"

namespace pbench {

ProbabilityTrace ProbabilityTrace::from_values(std::string waveform_id, std::vector<double> values) {
  ProbabilityTrace t;
  t.waveform_id = std::move(waveform_id);
  t.coverage.assign(values.size(), 1);
  t.values = std::move(values);
  return t;
}

ProbabilityTrace aggregate_windows(std::span<const WindowOutput> windows, std::int64_t n_samples) {
  if (n_samples <= 0) throw ValidationError("aggregate_windows: n_samples must be positive");
  const auto n = static_cast<std::size_t>(n_samples);
  ProbabilityTrace trace;
  trace.values.assign(n, 0.0);
  trace.coverage.assign(n, 0);
  if (windows.empty()) return trace;

  trace.waveform_id = windows.front().waveform_id;
  const std::size_t length = windows.front().probabilities.size();
  if (length == 0) throw ValidationError("aggregate_windows: empty window");
  std::vector<double> lo(n, 1.0), hi(n, 0.0);
  for (const auto& w : windows) {
    if (w.waveform_id != trace.waveform_id)
      throw ValidationError("aggregate_windows: windows from different waveforms ('" +
                            trace.waveform_id + "', '" + w.waveform_id + "')");
    if (w.probabilities.size() != length)
      throw ValidationError("aggregate_windows: inconsistent window lengths for '" +
                            w.waveform_id + "'");
    if (w.window_start_index < 0 ||
        static_cast<std::size_t>(w.window_start_index) + length > n)
      throw ValidationError("aggregate_windows: window at offset " +
                            std::to_string(w.window_start_index) + " does not fit in " +
                            std::to_string(n) + " samples");
    const auto start = static_cast<std::size_t>(w.window_start_index);
    for (std::size_t j = 0; j < length; ++j) {
      const double p = w.probabilities[j];
      if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("aggregate_windows: probability outside [0, 1] in '" +
                              w.waveform_id + "'");
      trace.values[start + j] += p;
      ++trace.coverage[start + j];
      lo[start + j] = std::min(lo[start + j], p);
      hi[start + j] = std::max(hi[start + j], p);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (trace.coverage[i] == 0) continue;
    // The clamp only absorbs rounding in the sum (three copies of 0.1 average
    // to 0.10000000000000002).
    trace.values[i] = std::clamp(trace.values[i] / trace.coverage[i], lo[i], hi[i]);
  }
  return trace;
}

std::vector<std::int64_t> window_offsets(std::int64_t n_samples, std::int64_t window_samples,
                                         std::int64_t stride_samples) {
  if (window_samples <= 0 || stride_samples <= 0)
    throw ValidationError("window_offsets: window and stride must be positive");
  std::vector<std::int64_t> offsets;
  for (std::int64_t s = 0; s + window_samples <= n_samples; s += stride_samples) offsets.push_back(s);
  return offsets;
}

std::string_view to_string(PickClass c) {
  switch (c) {
    case PickClass::true_positive:
      return "TP";
    case PickClass::false_positive:
      return "FP";
    case PickClass::unclassified:
      break;
  }
  return "unclassified";
}

std::vector<Pick> extract_picks(const ProbabilityTrace& trace, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw ValidationError("extract_picks: threshold must lie in (0, 1)");
  std::vector<Pick> picks;
  const std::size_t n = trace.size();
  std::size_t i = 0;
  while (i < n) {
    if (!(trace.defined(i) && trace.values[i] > threshold)) {
      ++i;
      continue;
    }
    std::size_t best = i;
    for (; i < n && trace.defined(i) && trace.values[i] > threshold; ++i)
      if (trace.values[i] > trace.values[best]) best = i;
    picks.push_back({trace.waveform_id, static_cast<std::int64_t>(best), trace.values[best],
                     PickClass::unclassified, std::nullopt});
  }
  return picks;
}

WaveformCounts classify_picks(std::span<const Pick> picks, std::int64_t labeled_p_index,
                              double sampling_rate_hz, double tp_half_width_s) {
  if (labeled_p_index < 0) throw ValidationError("classify_picks: missing P label");
  if (!(sampling_rate_hz > 0.0)) throw ValidationError("classify_picks: bad sampling rate");
  WaveformCounts counts;
  counts.kind = WaveformKind::earthquake;
  counts.picks.assign(picks.begin(), picks.end());
  if (!picks.empty()) counts.waveform_id = picks.front().waveform_id;

  std::optional<std::size_t> tp;
  std::int64_t tp_offset = 0;
  for (std::size_t k = 0; k < picks.size(); ++k) {
    const std::int64_t offset = picks[k].sample_index - labeled_p_index;
    if (std::abs(static_cast<double>(offset)) / sampling_rate_hz > tp_half_width_s) continue;
    const bool nearer = !tp || std::abs(offset) < std::abs(tp_offset) ||
                        (std::abs(offset) == std::abs(tp_offset) &&
                         picks[k].sample_index < picks[*tp].sample_index);
    if (nearer) {
      tp = k;
      tp_offset = offset;
    }
  }
  for (std::size_t k = 0; k < counts.picks.size(); ++k) {
    Pick& p = counts.picks[k];
    if (tp && k == *tp) {
      p.classification = PickClass::true_positive;
      p.residual_s = static_cast<double>(tp_offset) / sampling_rate_hz;
      counts.residuals_s.push_back(*p.residual_s);
    } else {
      p.classification = PickClass::false_positive;
      p.residual_s.reset();
    }
  }
  counts.tp = tp ? 1 : 0;
  counts.fn = 1 - counts.tp;
  counts.fp = static_cast<int>(picks.size()) - counts.tp;
  return counts;
}

WaveformCounts classify_noise(std::span<const Pick> picks) {
  WaveformCounts counts;
  counts.kind = WaveformKind::noise;
  counts.picks.assign(picks.begin(), picks.end());
  if (!picks.empty()) counts.waveform_id = picks.front().waveform_id;
  for (auto& p : counts.picks) {
    p.classification = PickClass::false_positive;
    p.residual_s.reset();
  }
  counts.fp = static_cast<int>(picks.size());
  return counts;
}

WaveformCounts score_waveform(const ProbabilityTrace& trace, const WaveformRecord& record,
                              double threshold, double tp_half_width_s) {
  const auto picks = extract_picks(trace, threshold);
  WaveformCounts counts =
      record.is_earthquake()
          ? classify_picks(picks, record.p_arrival_index.value_or(-1), record.sampling_rate_hz,
                           tp_half_width_s)
          : classify_noise(picks);
  counts.waveform_id = record.waveform_id;
  return counts;
}

std::vector<WindowOutput> parse_window_outputs(std::istream& in) {
  std::vector<WindowOutput> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      WindowOutput w;
      w.waveform_id = j.at("waveform_id").get<std::string>();
      w.window_start_index = j.at("window_start_index").get<std::int64_t>();
      w.probabilities = j.at("probabilities").get<std::vector<double>>();
      out.push_back(std::move(w));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad window output record: ") + e.what(), line_no);
    }
  }
  return out;
}

std::vector<WindowOutput> load_window_outputs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open window output file: " + path.string());
  return parse_window_outputs(in);
}

void write_window_outputs(std::ostream& out, std::span<const WindowOutput> windows) {
  for (const auto& w : windows) {
    nlohmann::ordered_json j;
    j["waveform_id"] = w.waveform_id;
    j["window_start_index"] = w.window_start_index;
    j["probabilities"] = w.probabilities;
    out << j.dump() << '\n';
  }
}

void save_window_outputs(const std::filesystem::path& path, std::span<const WindowOutput> windows) {
  write_file_atomic(path, [&](std::ostream& out) { write_window_outputs(out, windows); });
}

std::vector<std::pair<std::string, std::vector<WindowOutput>>> group_by_waveform(
    std::vector<WindowOutput> windows) {
  std::map<std::string, std::vector<WindowOutput>> grouped;
  for (auto& w : windows) grouped[w.waveform_id].push_back(std::move(w));
  return {std::make_move_iterator(grouped.begin()), std::make_move_iterator(grouped.end())};
}

}  // namespace pbench
