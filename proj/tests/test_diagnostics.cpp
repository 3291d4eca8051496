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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pbench/diagnostics.hpp"
#include "pbench/error.hpp"
#include "pbench/rng.hpp"
#include "pbench/synth.hpp"

using namespace pbench;

namespace {

double interpolate(const DensityCurve& c, double x) {
  for (std::size_t j = 1; j < c.grid.size(); ++j)
    if (c.grid[j] >= x) {
      const double f = (x - c.grid[j - 1]) / (c.grid[j] - c.grid[j - 1]);
      return c.density[j - 1] + f * (c.density[j] - c.density[j - 1]);
    }
  return c.density.back();
}

Trace3C tone(std::size_t n, double hz, double rate) {
  Trace3C t(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(2 * std::numbers::pi * hz * i / rate);
    t.components[0][i] = static_cast<float>(s);
    t.components[1][i] = static_cast<float>(0.5 * s);
    t.components[2][i] = static_cast<float>(2.0 * s);
  }
  return t;
}

}  // namespace

TEST(FeatureDensity, StandardGaussianPeak) {
  Rng rng(1);
  GroupValues g{"0", std::vector<double>(100000)};
  for (auto& v : g.values) v = standard_normal(rng);
  const auto curves = feature_density("x", std::span(&g, 1));
  ASSERT_EQ(curves.size(), 1u);
  const double at0 = interpolate(curves[0], 0.0);
  EXPECT_NEAR(at0, 1.0 / std::sqrt(2 * std::numbers::pi), 0.05 * 0.3989);
  EXPECT_NEAR(trapezoid_integral(curves[0].grid, curves[0].density), 1.0, 1e-6);
}

TEST(FeatureDensity, IntegratesToOneAndSharesGrid) {
  std::mt19937_64 rng(2);
  std::exponential_distribution<double> e(2.0);
  std::vector<GroupValues> groups;
  for (int k = 0; k < 5; ++k) {
    GroupValues g{std::to_string(k), {}};
    for (int i = 0; i < 50 + 40 * k; ++i) g.values.push_back(e(rng) + k);
    groups.push_back(g);
  }
  groups.push_back({"test", {3.0, 3.1, 2.9}});
  const auto curves = feature_density("magnitude", groups, {.points = 300});
  for (const auto& c : curves) {
    EXPECT_EQ(c.grid, curves[0].grid);
    EXPECT_NEAR(trapezoid_integral(c.grid, c.density), 1.0, 1e-6);
    for (double d : c.density) EXPECT_GE(d, 0.0);
    EXPECT_EQ(c.feature_name, "magnitude");
  }
  EXPECT_EQ(curves.back().group_id, "test");
}

TEST(FeatureDensity, IdenticalGroupsIdenticalCurves) {
  GroupValues a{"a", {1.0, 2.0, 2.5, 4.0}};
  GroupValues b{"b", a.values};
  const std::vector<GroupValues> groups{a, b};
  const auto c = feature_density("x", groups);
  EXPECT_EQ(c[0].density, c[1].density);
}

TEST(FeatureDensity, DegenerateSpikeIsFlagged) {
  const std::vector<GroupValues> groups{{"flat", {2.0, 2.0, 2.0}}, {"wide", {0.0, 1.0, 3.0, 5.0}}};
  const auto c = feature_density("x", groups);
  EXPECT_TRUE(c[0].degenerate);
  EXPECT_FALSE(c[1].degenerate);
  int nonzero = 0;
  for (double d : c[0].density) nonzero += d > 0;
  EXPECT_EQ(nonzero, 1);
  EXPECT_NEAR(trapezoid_integral(c[0].grid, c[0].density), 1.0, 1e-9);
  // Alone, the spike still gets a grid.
  const std::vector<GroupValues> alone{{"flat", {2.0, 2.0}}};
  EXPECT_NEAR(trapezoid_integral(feature_density("x", alone)[0].grid, feature_density("x", alone)[0].density), 1.0, 1e-9);
}

TEST(FeatureDensity, Preconditions) {
  const std::vector<GroupValues> one{{"a", {1.0}}};
  EXPECT_THROW(feature_density("x", one), ValidationError);
  const std::vector<GroupValues> nan{{"a", {1.0, std::nan("")}}};
  EXPECT_THROW(feature_density("x", nan), ValidationError);
}

TEST(SilvermanBandwidth, MatchesRule) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8};
  // sd = 2.449..., IQR/1.34 = 3.5/1.34 = 2.61...
  const double sd = std::sqrt(42.0 / 7.0);
  EXPECT_NEAR(silverman_bandwidth(v), 0.9 * sd * std::pow(8.0, -0.2), 1e-12);
}

TEST(FrequencyBin, HalfOpen) {
  EXPECT_EQ(frequency_bin(0.0, 5.0), 0);
  EXPECT_EQ(frequency_bin(4.999, 5.0), 0);
  EXPECT_EQ(frequency_bin(5.0, 5.0), 1);
  EXPECT_EQ(frequency_bin(10.0, 5.0), 2);
}

TEST(WindowFeatures, PureToneArgmax) {
  const auto t = tone(3000, 10.0, 100.0);
  const auto f = window_features(t, 500, 100.0);
  EXPECT_EQ(f.window_samples, 1000u);
  EXPECT_FALSE(f.truncated);
  EXPECT_DOUBLE_EQ(f.frequency_resolution_hz, 0.1);
  for (const auto& c : f.components) {
    ASSERT_TRUE(c.defined);
    EXPECT_NEAR(c.argmax_frequency_hz, 10.0, 0.1);
    EXPECT_EQ(frequency_bin(c.argmax_frequency_hz, 5.0), 2);
  }
  // Largest sample of a 10 Hz tone at 100 Hz is sin(72 deg).
  const double top = std::sin(2 * std::numbers::pi * 0.2);
  EXPECT_NEAR(f.components[2].log_peak_amplitude, std::log10(2.0 * top), 1e-6);
  EXPECT_NEAR(f.components[1].log_peak_amplitude, std::log10(0.5 * top), 1e-6);
  // Every spectral sample lands in exactly one bin.
  std::size_t total = 0;
  for (const auto& b : f.components[0].bin_log_amplitudes) total += b.size();
  EXPECT_EQ(total, f.frequencies_hz.size());
}

TEST(WindowFeatures, BinMaximaMatchDirectDft) {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> nd(0, 100);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 1500 + 37 * trial;
    Trace3C t(n);
    for (auto& comp : t.components)
      for (auto& v : comp) v = nd(rng);
    const std::int64_t p = 100 + trial * 13;
    const auto f = window_features(t, p, 100.0);
    for (std::size_t c = 0; c < 3; ++c) {
      std::vector<double> w(t.components[c].begin() + p, t.components[c].begin() + p + 1000);
      const auto mags = oracle::direct_dft_magnitudes(w);
      ASSERT_EQ(mags.size(), f.components[c].magnitudes.size());
      std::vector<double> want(f.components[c].bin_max_log_amplitude.size(), -1e300);
      for (std::size_t k = 0; k < mags.size(); ++k) {
        EXPECT_NEAR(f.components[c].magnitudes[k], mags[k], 1e-7 * (1 + mags[k]));
        const auto b = static_cast<std::size_t>(std::floor(k * 0.1 / 5.0));
        want[b] = std::max(want[b], std::log10(std::max(mags[k], 1e-12)));
      }
      for (std::size_t b = 0; b < want.size(); ++b)
        EXPECT_NEAR(f.components[c].bin_max_log_amplitude[b], want[b], 1e-9);
    }
  }
}

TEST(WindowFeatures, ZeroWindowAndTruncation) {
  Trace3C t(1200);
  const auto f = window_features(t, 0, 100.0);
  for (const auto& c : f.components) {
    EXPECT_FALSE(c.defined);
    EXPECT_TRUE(std::isnan(c.log_peak_amplitude));
  }
  const auto tr = window_features(tone(1200, 5.0, 100.0), 700, 100.0);
  EXPECT_TRUE(tr.truncated);
  EXPECT_EQ(tr.window_samples, 500u);
  EXPECT_THROW(window_features(t, 1200, 100.0), ValidationError);
}

TEST(SpIntervals, Arithmetic) {
  WaveformRecord w;
  w.waveform_id = "w";
  w.source_id = "s";
  w.p_arrival_index = 1000;
  w.s_arrival_index = 1500;
  w.n_samples = 6000;
  WaveformRecord v = w;
  v.waveform_id = "v";
  v.s_arrival_index.reset();
  const Dataset d({SourceRecord{"s", 1, 1}}, {w, v});
  const auto s = sp_intervals(d);
  ASSERT_EQ(s.intervals_s.size(), 1u);
  EXPECT_DOUBLE_EQ(s.intervals_s[0], 5.0);
  EXPECT_DOUBLE_EQ(s.fraction_with_s, 0.5);
  const Dataset none({SourceRecord{"s", 1, 1}}, {v});
  EXPECT_TRUE(sp_intervals(none).intervals_s.empty());
  EXPECT_DOUBLE_EQ(sp_intervals(none).fraction_with_s, 0.0);
}

TEST(SpIntervals, RecoversSyntheticLabels) {
  GeoDatasetParams p;
  p.n_clusters = 3;
  p.sources_per_cluster = 20;
  const auto g = gen_geo_dataset(p);
  const auto s = sp_intervals(g.dataset);
  std::size_t k = 0;
  for (const auto& w : g.dataset.waveforms()) {
    if (!w.s_arrival_index) continue;
    EXPECT_EQ(s.waveform_ids[k], w.waveform_id);
    EXPECT_DOUBLE_EQ(s.intervals_s[k], (*w.s_arrival_index - *w.p_arrival_index) / w.sampling_rate_hz);
    ++k;
  }
  EXPECT_EQ(k, s.intervals_s.size());
}
