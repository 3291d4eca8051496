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

#ifndef PBENCH_DIAGNOSTICS_HPP_
#define PBENCH_DIAGNOSTICS_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pbench/dataset.hpp"
#include "pbench/trace_io.hpp"

namespace pbench {

struct GroupValues {
  std::string group_id;  // cluster id or "test"
  std::vector<double> values;
};

struct GridSpec {
  int points = 512;
  std::optional<double> low;   // default: global min - 3 * largest bandwidth
  std::optional<double> high;  // default: global max + 3 * largest bandwidth
};

struct DensityCurve {
  std::string feature_name;
  std::string group_id;
  std::vector<double> grid;
  std::vector<double> density;  // trapezoid integral over grid is 1
  double bandwidth = 0.0;
  std::size_t n = 0;
  bool degenerate = false;  // all values identical: unit mass on one grid point
};

// 0.9 * min(sd, IQR / 1.34) * n^(-1/5), falling back to whichever spread is positive.
double silverman_bandwidth(std::span<const double> values);

double trapezoid_integral(std::span<const double> grid, std::span<const double> density);

// Gaussian KDE per group on one shared grid, each renormalized to integrate to 1.
// Every group needs at least 2 finite values.
std::vector<DensityCurve> feature_density(const std::string& feature_name,
                                          std::span<const GroupValues> groups,
                                          const GridSpec& grid = {});

struct WindowFeatureOptions {
  double window_s = 10.0;
  double bin_width_hz = 5.0;
  double log_floor = 1e-12;  // log10 guard for zero amplitudes
};

struct ComponentFeatures {
  bool defined = false;  // false for an all-zero window
  std::vector<double> magnitudes;  // one-sided DFT magnitudes, k = 0..n/2
  std::vector<double> bin_max_log_amplitude;           // per [5k, 5k+5) Hz bin
  std::vector<std::vector<double>> bin_log_amplitudes;  // every log amplitude per bin
  double argmax_frequency_hz = 0.0;
  double log_peak_amplitude = 0.0;  // log10 of peak |sample| in the window
};

struct WindowFeatures {
  std::size_t window_samples = 0;
  bool truncated = false;  // window ran past the end of the trace
  double frequency_resolution_hz = 0.0;
  std::vector<double> frequencies_hz;
  std::array<ComponentFeatures, 3> components;  // Z, N, E
};

// Half-open bins: f belongs to bin floor(f / width).
int frequency_bin(double frequency_hz, double bin_width_hz);

// One-sided magnitude spectrum |X_k| of the full window (no taper).
std::vector<double> magnitude_spectrum(std::span<const double> samples);

// Spectral and amplitude features of the window starting at the P label.
WindowFeatures window_features(const Trace3C& trace, std::int64_t p_index, double sampling_rate_hz,
                               const WindowFeatureOptions& options = {});

struct SpIntervalSummary {
  std::vector<std::string> waveform_ids;
  std::vector<double> intervals_s;
  std::size_t earthquake_waveforms = 0;
  double fraction_with_s = 0.0;
};

SpIntervalSummary sp_intervals(const Dataset& dataset);

}  // namespace pbench

#endif  // PBENCH_DIAGNOSTICS_HPP_
