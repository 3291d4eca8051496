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

#include "pbench/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>

#include <fftw3.h>

#include "pbench/error.hpp"

namespace pbench {

namespace {

double sample_sd(std::span<const double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Linear-interpolated quantile of sorted data.
double quantile_sorted(std::span<const double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double silverman_bandwidth(std::span<const double> values) {
  if (values.size() < 2) throw ValidationError("silverman_bandwidth: need at least 2 values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = sample_sd(sorted);
  const double iqr = (quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25)) / 1.34;
  double spread = std::min(sd, iqr);
  if (!(spread > 0.0)) spread = std::max(sd, iqr);
  return 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

double trapezoid_integral(std::span<const double> grid, std::span<const double> density) {
  double area = 0.0;
  for (std::size_t j = 1; j < grid.size(); ++j)
    area += 0.5 * (density[j] + density[j - 1]) * (grid[j] - grid[j - 1]);
  return area;
}

std::vector<DensityCurve> feature_density(const std::string& feature_name,
                                          std::span<const GroupValues> groups, const GridSpec& spec) {
  if (spec.points < 3) throw ValidationError("feature_density: grid needs at least 3 points");
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -vmin;
  double hmax = 0.0;
  std::vector<double> bandwidths;
  std::vector<bool> degenerate;
  for (const auto& g : groups) {
    if (g.values.size() < 2)
      throw ValidationError("feature_density: group '" + g.group_id + "' has fewer than 2 values");
    for (double v : g.values) {
      if (!std::isfinite(v))
        throw ValidationError("feature_density: non-finite value in group '" + g.group_id + "'");
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    const auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
    degenerate.push_back(*lo == *hi);
    bandwidths.push_back(degenerate.back() ? 0.0 : silverman_bandwidth(g.values));
    hmax = std::max(hmax, bandwidths.back());
  }
  if (groups.empty()) return {};

  double low = spec.low.value_or(vmin - 3.0 * hmax);
  double high = spec.high.value_or(vmax + 3.0 * hmax);
  if (!(high > low)) {
    low -= 1.0;
    high += 1.0;
  }
  std::vector<double> grid(static_cast<std::size_t>(spec.points));
  const double step = (high - low) / (spec.points - 1);
  for (int j = 0; j < spec.points; ++j) grid[j] = low + j * step;
  grid.back() = high;

  std::vector<DensityCurve> curves;
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    DensityCurve curve;
    curve.feature_name = feature_name;
    curve.group_id = g.group_id;
    curve.grid = grid;
    curve.density.assign(grid.size(), 0.0);
    curve.n = g.values.size();
    curve.bandwidth = bandwidths[gi];
    curve.degenerate = degenerate[gi];
    if (curve.degenerate) {
      // All mass on the nearest grid point; trapezoid weight is a full step
      // inside the grid and half a step at either end.
      const double v = g.values.front();
      const auto j = static_cast<std::size_t>(std::clamp(
          std::lround((v - low) / step), 0L, static_cast<long>(grid.size() - 1)));
      const bool edge = j == 0 || j + 1 == grid.size();
      curve.density[j] = edge ? 2.0 / step : 1.0 / step;
    } else {
      const double h = curve.bandwidth;
      const double scale = inv_sqrt_2pi / (static_cast<double>(g.values.size()) * h);
      for (std::size_t j = 0; j < grid.size(); ++j) {
        double s = 0.0;
        for (double v : g.values) {
          const double z = (grid[j] - v) / h;
          s += std::exp(-0.5 * z * z);
        }
        curve.density[j] = s * scale;
      }
      const double area = trapezoid_integral(curve.grid, curve.density);
      if (!(area > 0.0))
        throw ValidationError("feature_density: grid misses the support of group '" + g.group_id + "'");
      for (double& d : curve.density) d /= area;
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

int frequency_bin(double frequency_hz, double bin_width_hz) {
  return static_cast<int>(std::floor(frequency_hz / bin_width_hz));
}

std::vector<double> magnitude_spectrum(std::span<const double> samples) {
  const int n = static_cast<int>(samples.size());
  if (n == 0) return {};
  std::vector<double> in(samples.begin(), samples.end());
  const int bins = n / 2 + 1;
  fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(bins));
  fftw_plan plan;
  {
    // Planner calls are not thread-safe; execution is.
    static std::mutex planner;
    std::lock_guard lock(planner);
    plan = fftw_plan_dft_r2c_1d(n, in.data(), out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::vector<double> mags(static_cast<std::size_t>(bins));
  for (int k = 0; k < bins; ++k) mags[k] = std::hypot(out[k][0], out[k][1]);
  {
    static std::mutex destroyer;
    std::lock_guard lock(destroyer);
    fftw_destroy_plan(plan);
  }
  fftw_free(out);
  return mags;
}

WindowFeatures window_features(const Trace3C& trace, std::int64_t p_index, double rate,
                               const WindowFeatureOptions& options) {
  if (!(rate > 0.0)) throw ValidationError("window_features: sampling rate must be positive");
  if (!(options.window_s > 0.0 && options.bin_width_hz > 0.0 && options.log_floor > 0.0))
    throw ValidationError("window_features: window, bin width and log floor must be positive");
  const auto n = static_cast<std::int64_t>(trace.n_samples());
  if (p_index < 0 || p_index >= n)
    throw ValidationError("window_features: P index outside the trace");
  const auto wanted = static_cast<std::int64_t>(std::llround(options.window_s * rate));
  WindowFeatures wf;
  wf.truncated = p_index + wanted > n;
  const std::int64_t len = std::min(wanted, n - p_index);
  wf.window_samples = static_cast<std::size_t>(len);
  wf.frequency_resolution_hz = rate / static_cast<double>(len);
  const std::size_t n_freq = static_cast<std::size_t>(len / 2 + 1);
  for (std::size_t k = 0; k < n_freq; ++k)
    wf.frequencies_hz.push_back(static_cast<double>(k) * wf.frequency_resolution_hz);
  const int n_bins = frequency_bin(wf.frequencies_hz.back(), options.bin_width_hz) + 1;

  for (std::size_t c = 0; c < 3; ++c) {
    ComponentFeatures& cf = wf.components[c];
    const auto all = trace.component(static_cast<Component>(c));
    std::vector<double> window(all.begin() + p_index, all.begin() + p_index + len);
    double peak = 0.0;
    for (double v : window) peak = std::max(peak, std::abs(v));
    cf.magnitudes = magnitude_spectrum(window);
    cf.defined = peak > 0.0;
    if (!cf.defined) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      cf.argmax_frequency_hz = nan;
      cf.log_peak_amplitude = nan;
      continue;
    }
    cf.log_peak_amplitude = std::log10(std::max(peak, options.log_floor));
    const auto top = std::max_element(cf.magnitudes.begin(), cf.magnitudes.end());
    cf.argmax_frequency_hz = wf.frequencies_hz[static_cast<std::size_t>(top - cf.magnitudes.begin())];
    cf.bin_log_amplitudes.assign(static_cast<std::size_t>(n_bins), {});
    cf.bin_max_log_amplitude.assign(static_cast<std::size_t>(n_bins),
                                    -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < n_freq; ++k) {
      const int b = frequency_bin(wf.frequencies_hz[k], options.bin_width_hz);
      const double la = std::log10(std::max(cf.magnitudes[k], options.log_floor));
      cf.bin_log_amplitudes[b].push_back(la);
      cf.bin_max_log_amplitude[b] = std::max(cf.bin_max_log_amplitude[b], la);
    }
  }
  return wf;
}

SpIntervalSummary sp_intervals(const Dataset& dataset) {
  SpIntervalSummary s;
  for (const auto& w : dataset.waveforms()) {
    if (!w.is_earthquake()) continue;
    ++s.earthquake_waveforms;
    if (!w.s_arrival_index || !w.p_arrival_index) continue;
    s.waveform_ids.push_back(w.waveform_id);
    s.intervals_s.push_back(static_cast<double>(*w.s_arrival_index - *w.p_arrival_index) /
                            w.sampling_rate_hz);
  }
  s.fraction_with_s = s.earthquake_waveforms == 0
                          ? 0.0
                          : static_cast<double>(s.intervals_s.size()) /
                                static_cast<double>(s.earthquake_waveforms);
  return s;
}

}  // namespace pbench
