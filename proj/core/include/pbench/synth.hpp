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

#ifndef PBENCH_SYNTH_HPP_
#define PBENCH_SYNTH_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pbench/dataset.hpp"
#include "pbench/design.hpp"
#include "pbench/picker_eval.hpp"
#include "pbench/trace_io.hpp"

namespace pbench {

// Synthetic picker output: background plus Gaussian bumps, clipped to [0, 1].
struct SynthTraceParams {
  double bump_sigma_s = 0.1;
  double bump_height = 0.9;
  double background_level = 0.05;
  double pick_error_sd_s = 0.0;  // bump center jitter around the label
  double miss_rate = 0.0;        // probability the labeled bump is absent
  double false_bump_rate = 0.0;  // Poisson mean of spurious bumps per trace
  std::uint64_t seed = 0;

  void validate() const;
};

// Deterministic per (params.seed, waveform_id). Earthquakes get the labeled
// bump (unless missed); every waveform gets the spurious bumps.
ProbabilityTrace gen_trace(const WaveformRecord& waveform, const SynthTraceParams& params);

// Slices a trace into overlapping windows without end-padding.
std::vector<WindowOutput> gen_window_outputs(const ProbabilityTrace& trace,
                                             std::int64_t window_samples = kDefaultWindowSamples,
                                             std::int64_t stride_samples = kDefaultStrideSamples);

struct GeoDatasetParams {
  int n_clusters = 20;
  int sources_per_cluster = 50;
  int waveforms_per_source = 3;
  double spread_deg = 0.1;
  double noise_ratio = 0.114;       // per blob: ceil(noise_ratio * earthquake waveforms)
  std::int64_t n_samples = 6000;
  double sampling_rate_hz = 100.0;
  double s_label_fraction = 0.6;    // share of earthquake waveforms with an S label
  std::vector<GeoPoint> centers;    // empty: a jittered grid over Italy-sized extent
  std::optional<std::string> trace_dir;  // sets trace_ref to <dir>/<waveform_id>.pbt
  std::uint64_t seed = 0;
};

struct GeoDataset {
  Dataset dataset;
  std::vector<GeoPoint> centers;
  std::map<std::string, int> source_blob;  // ground-truth membership
  std::map<std::string, int> noise_blob;
};

// Sources from Gaussian blobs around known centers, stations co-located with
// their blob, valid P (and sometimes S) labels, and noise records per blob.
GeoDataset gen_geo_dataset(const GeoDatasetParams& params);

struct SeismogramParams {
  double dominant_hz = 5.0;
  double amplitude = 1000.0;
  double decay_s = 2.0;
  double noise_sd = 10.0;
  std::uint64_t seed = 0;
};

// Toy 3-component waveform (noise plus a decaying tone from the P label). Only
// meant to exercise diagnostics and trace I/O.
Trace3C gen_seismogram(const WaveformRecord& waveform, const SeismogramParams& params);

// Generating parameters of the mixed-effects metric model.
struct MetricModelParams {
  double grand_mean = 0.0;
  std::vector<double> model_effects;     // sums to 0
  std::vector<double> quantity_effects;  // sums to 0
  std::vector<double> interactions;      // models x quantities or empty (all 0)
  std::vector<double> var_data;          // models x quantities, or one value for all
  std::vector<double> var_train;         // models x quantities, or one value for all

  double cell_mean(int model, int quantity) const;
  double data_variance(int model, int quantity) const;
  double train_variance(int model, int quantity) const;
  void validate(const DesignSpec& design) const;
};

MetricTable gen_metrics(std::string metric_name, const DesignSpec& design,
                        const MetricModelParams& params, std::uint64_t seed);

}  // namespace pbench

#endif  // PBENCH_SYNTH_HPP_
