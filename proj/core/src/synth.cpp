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

#include "pbench/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ctime>
#include <numbers>
#include <numeric>
#include <random>

#include "pbench/error.hpp"
#include "pbench/rng.hpp"

namespace pbench {

void SynthTraceParams::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!(bump_sigma_s > 0.0)) throw ValidationError("synth: bump_sigma_s must be positive");
  if (!unit(bump_height) || !unit(background_level))
    throw ValidationError("synth: bump_height and background_level must lie in [0, 1]");
  if (!unit(miss_rate)) throw ValidationError("synth: miss_rate must lie in [0, 1]");
  if (!(false_bump_rate >= 0.0)) throw ValidationError("synth: false_bump_rate must be nonnegative");
  if (!(pick_error_sd_s >= 0.0)) throw ValidationError("synth: pick_error_sd_s must be nonnegative");
}

namespace {

void add_bump(std::vector<double>& values, double rate, double center_s, double sigma_s,
              double height) {
  // exp(-50) is far below double resolution next to any background level.
  const double reach = 10.0 * sigma_s;
  const auto n = static_cast<std::int64_t>(values.size());
  const auto first = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil((center_s - reach) * rate)));
  const auto last = std::min<std::int64_t>(n - 1, static_cast<std::int64_t>(std::floor((center_s + reach) * rate)));
  for (std::int64_t k = first; k <= last; ++k) {
    const double z = (static_cast<double>(k) / rate - center_s) / sigma_s;
    values[static_cast<std::size_t>(k)] += height * std::exp(-0.5 * z * z);
  }
}

}  // namespace

ProbabilityTrace gen_trace(const WaveformRecord& waveform, const SynthTraceParams& params) {
  params.validate();
  Rng rng(derive_seed(params.seed, waveform.waveform_id));
  const double rate = waveform.sampling_rate_hz;
  std::vector<double> values(static_cast<std::size_t>(waveform.n_samples), params.background_level);

  // Fixed draw order keeps streams aligned across parameter changes.
  const bool missed = uniform01(rng) < params.miss_rate;
  const double jitter = params.pick_error_sd_s * standard_normal(rng);
  if (waveform.is_earthquake() && !missed) {
    const double center = static_cast<double>(waveform.p_arrival_index.value()) / rate + jitter;
    add_bump(values, rate, center, params.bump_sigma_s, params.bump_height);
  }
  std::poisson_distribution<int> spurious(params.false_bump_rate > 0.0 ? params.false_bump_rate : 1.0);
  const int n_false = params.false_bump_rate > 0.0 ? spurious(rng) : 0;
  const double duration = static_cast<double>(waveform.n_samples) / rate;
  for (int b = 0; b < n_false; ++b)
    add_bump(values, rate, duration * uniform01(rng), params.bump_sigma_s, params.bump_height);

  for (double& v : values) v = std::clamp(v, 0.0, 1.0);
  return ProbabilityTrace::from_values(waveform.waveform_id, std::move(values));
}

std::vector<WindowOutput> gen_window_outputs(const ProbabilityTrace& trace,
                                             std::int64_t window_samples,
                                             std::int64_t stride_samples) {
  std::vector<WindowOutput> out;
  for (std::int64_t start :
       window_offsets(static_cast<std::int64_t>(trace.size()), window_samples, stride_samples)) {
    WindowOutput w;
    w.waveform_id = trace.waveform_id;
    w.window_start_index = start;
    w.probabilities.assign(trace.values.begin() + start, trace.values.begin() + start + window_samples);
    out.push_back(std::move(w));
  }
  return out;
}

namespace {

std::vector<GeoPoint> default_centers(int n, Rng& rng) {
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int rows = (n + cols - 1) / cols;
  const double lat0 = 36.5, lat1 = 46.5, lon0 = 7.5, lon1 = 18.5;
  const double dlat = rows > 1 ? (lat1 - lat0) / (rows - 1) : 0.0;
  const double dlon = cols > 1 ? (lon1 - lon0) / (cols - 1) : 0.0;
  std::vector<GeoPoint> centers;
  for (int c = 0; c < n; ++c) {
    const int row = c / cols;
    const int col = c % cols;
    centers.push_back({lat0 + row * dlat + 0.15 * dlat * (uniform01(rng) - 0.5),
                       lon0 + col * dlon + 0.15 * dlon * (uniform01(rng) - 0.5)});
  }
  return centers;
}

GeoPoint jittered(const GeoPoint& center, double spread, Rng& rng) {
  GeoPoint p{center.latitude + spread * standard_normal(rng),
             center.longitude + spread * standard_normal(rng)};
  p.latitude = std::clamp(p.latitude, -90.0, 90.0);
  p.longitude = std::clamp(p.longitude, -180.0, 180.0);
  return p;
}

std::string padded(const char* prefix, std::size_t n) {
  std::string digits = std::to_string(n);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return prefix + digits;
}

std::string utc_timestamp(std::int64_t seconds_since_epoch) {
  const std::time_t t = static_cast<std::time_t>(seconds_since_epoch);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

GeoDataset gen_geo_dataset(const GeoDatasetParams& p) {
  if (p.n_clusters < 1 || p.sources_per_cluster < 1 || p.waveforms_per_source < 1 ||
      p.n_samples < 2 || !(p.sampling_rate_hz > 0.0) || !(p.spread_deg >= 0.0) ||
      !(p.noise_ratio >= 0.0))
    throw ValidationError("gen_geo_dataset: counts, rate and spread must be positive");
  if (!p.centers.empty() && static_cast<int>(p.centers.size()) != p.n_clusters)
    throw ValidationError("gen_geo_dataset: centers must match n_clusters");

  Rng rng(p.seed);
  GeoDataset out;
  out.centers = p.centers.empty() ? default_centers(p.n_clusters, rng) : p.centers;

  std::vector<SourceRecord> sources;
  std::vector<WaveformRecord> waveforms;
  std::size_t n_source = 0, n_eq = 0, n_noise = 0;
  const std::int64_t epoch_2020 = 1577836800;
  auto trace_ref = [&](const std::string& id) -> std::optional<std::string> {
    if (!p.trace_dir) return std::nullopt;
    return *p.trace_dir + "/" + id + ".pbt";
  };
  const auto n = p.n_samples;
  const double rate = p.sampling_rate_hz;

  for (int blob = 0; blob < p.n_clusters; ++blob) {
    const GeoPoint& center = out.centers[blob];
    std::size_t blob_eq = 0;
    for (int s = 0; s < p.sources_per_cluster; ++s) {
      SourceRecord src;
      src.source_id = padded("src-", ++n_source);
      const GeoPoint loc = jittered(center, p.spread_deg, rng);
      src.latitude = loc.latitude;
      src.longitude = loc.longitude;
      src.depth_km = std::round((2.0 + 28.0 * uniform01(rng)) * 100.0) / 100.0;
      src.magnitude = std::round((0.5 + 4.0 * uniform01(rng)) * 10.0) / 10.0;
      src.origin_time = utc_timestamp(epoch_2020 + static_cast<std::int64_t>(n_source) * 3607);
      out.source_blob[src.source_id] = blob;
      for (int w = 0; w < p.waveforms_per_source; ++w) {
        WaveformRecord rec;
        rec.waveform_id = padded("eq-", ++n_eq);
        rec.kind = WaveformKind::earthquake;
        rec.source_id = src.source_id;
        const GeoPoint station = jittered(center, p.spread_deg, rng);
        rec.station_latitude = station.latitude;
        rec.station_longitude = station.longitude;
        rec.sampling_rate_hz = rate;
        rec.n_samples = n;
        std::uniform_int_distribution<std::int64_t> p_pick(n / 5, std::max(n / 5, n / 2));
        rec.p_arrival_index = p_pick(rng);
        if (uniform01(rng) < p.s_label_fraction) {
          std::uniform_int_distribution<std::int64_t> gap(static_cast<std::int64_t>(rate),
                                                           static_cast<std::int64_t>(15 * rate));
          const auto s_index = *rec.p_arrival_index + gap(rng);
          if (s_index < n) rec.s_arrival_index = s_index;
        }
        rec.trace_ref = trace_ref(rec.waveform_id);
        waveforms.push_back(std::move(rec));
        ++blob_eq;
      }
      sources.push_back(std::move(src));
    }
    // Rounded up so regional totals never fall short of the rounded split targets.
    const auto blob_noise = static_cast<std::size_t>(std::ceil(p.noise_ratio * static_cast<double>(blob_eq)));
    for (std::size_t k = 0; k < blob_noise; ++k) {
      WaveformRecord rec;
      rec.waveform_id = padded("noise-", ++n_noise);
      rec.kind = WaveformKind::noise;
      const GeoPoint station = jittered(center, p.spread_deg, rng);
      rec.station_latitude = station.latitude;
      rec.station_longitude = station.longitude;
      rec.sampling_rate_hz = rate;
      rec.n_samples = n;
      rec.trace_ref = trace_ref(rec.waveform_id);
      out.noise_blob[rec.waveform_id] = blob;
      waveforms.push_back(std::move(rec));
    }
  }
  out.dataset = Dataset(std::move(sources), std::move(waveforms));
  return out;
}

Trace3C gen_seismogram(const WaveformRecord& waveform, const SeismogramParams& params) {
  Rng rng(derive_seed(params.seed, waveform.waveform_id));
  Trace3C trace(static_cast<std::size_t>(waveform.n_samples));
  const double rate = waveform.sampling_rate_hz;
  constexpr std::array<double, 3> kComponentGain{1.0, 0.6, 0.5};
  for (std::size_t c = 0; c < 3; ++c) {
    const double phase = 2.0 * std::numbers::pi * uniform01(rng);
    auto& samples = trace.components[c];
    for (std::size_t k = 0; k < samples.size(); ++k) {
      double v = params.noise_sd * standard_normal(rng);
      if (waveform.is_earthquake()) {
        const double t = (static_cast<double>(k) - static_cast<double>(*waveform.p_arrival_index)) / rate;
        if (t >= 0.0)
          v += kComponentGain[c] * params.amplitude * std::exp(-t / params.decay_s) *
               std::sin(2.0 * std::numbers::pi * params.dominant_hz * t + phase);
      }
      samples[k] = static_cast<float>(v);
    }
  }
  return trace;
}

double MetricModelParams::cell_mean(int m, int a) const {
  const double inter =
      interactions.empty() ? 0.0
                           : interactions[static_cast<std::size_t>(m) * quantity_effects.size() + a];
  return grand_mean + model_effects[m] + quantity_effects[a] + inter;
}

namespace {

double per_cell(const std::vector<double>& v, int m, int a, std::size_t quantities) {
  return v.size() == 1 ? v[0] : v[static_cast<std::size_t>(m) * quantities + a];
}

}  // namespace

double MetricModelParams::data_variance(int m, int a) const {
  return per_cell(var_data, m, a, quantity_effects.size());
}

double MetricModelParams::train_variance(int m, int a) const {
  return per_cell(var_train, m, a, quantity_effects.size());
}

void MetricModelParams::validate(const DesignSpec& design) const {
  design.validate_shape();
  const auto M = static_cast<std::size_t>(design.models);
  const auto A = static_cast<std::size_t>(design.quantities());
  if (model_effects.size() != M) throw ValidationError("gen_metrics: model_effects size mismatch");
  if (quantity_effects.size() != A)
    throw ValidationError("gen_metrics: quantity_effects size mismatch");
  if (!interactions.empty() && interactions.size() != M * A)
    throw ValidationError("gen_metrics: interactions size mismatch");
  for (const auto* v : {&var_data, &var_train}) {
    if (v->size() != 1 && v->size() != M * A)
      throw ValidationError("gen_metrics: variance size mismatch");
    for (double x : *v)
      if (!(x >= 0.0)) throw ValidationError("gen_metrics: variances must be nonnegative");
  }
  constexpr double kTol = 1e-9;
  auto sum = [](auto first, auto last) { return std::accumulate(first, last, 0.0); };
  if (std::abs(sum(model_effects.begin(), model_effects.end())) > kTol)
    throw ValidationError("gen_metrics: model effects must sum to zero");
  if (std::abs(sum(quantity_effects.begin(), quantity_effects.end())) > kTol)
    throw ValidationError("gen_metrics: quantity effects must sum to zero");
  if (!interactions.empty()) {
    for (std::size_t m = 0; m < M; ++m) {
      double row = 0.0;
      for (std::size_t a = 0; a < A; ++a) row += interactions[m * A + a];
      if (std::abs(row) > kTol) throw ValidationError("gen_metrics: interaction rows must sum to zero");
    }
    for (std::size_t a = 0; a < A; ++a) {
      double col = 0.0;
      for (std::size_t m = 0; m < M; ++m) col += interactions[m * A + a];
      if (std::abs(col) > kTol) throw ValidationError("gen_metrics: interaction columns must sum to zero");
    }
  }
}

MetricTable gen_metrics(std::string metric_name, const DesignSpec& design,
                        const MetricModelParams& params, std::uint64_t seed) {
  params.validate(design);
  MetricTable table(std::move(metric_name), design);
  Rng rng(seed);
  for (int m = 0; m < design.models; ++m) {
    for (int a = 0; a < design.quantities(); ++a) {
      const double mean = params.cell_mean(m, a);
      const double sd_data = std::sqrt(params.data_variance(m, a));
      const double sd_train = std::sqrt(params.train_variance(m, a));
      for (int d = 0; d < design.cluster_sets; ++d) {
        const double e_data = sd_data * standard_normal(rng);
        for (int i = 0; i < design.initializations; ++i)
          table.set({m, a, d, i}, mean + e_data + sd_train * standard_normal(rng));
      }
    }
  }
  return table;
}

}  // namespace pbench
