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

#ifndef PBENCH_DATASET_HPP_
#define PBENCH_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pbench {

inline constexpr std::string_view kMetadataSchema = "picker-bench/1";

struct GeoPoint {
  double latitude = 0.0;
  double longitude = 0.0;
  bool operator==(const GeoPoint&) const = default;
};

struct SourceRecord {
  std::string source_id;
  double latitude = 0.0;
  double longitude = 0.0;
  std::optional<double> depth_km;
  std::optional<double> magnitude;
  std::optional<std::string> origin_time;  // ISO-8601 UTC

  GeoPoint location() const { return {latitude, longitude}; }
  bool operator==(const SourceRecord&) const = default;
};

enum class WaveformKind { earthquake, noise };

std::string_view to_string(WaveformKind kind);
WaveformKind waveform_kind_from_string(std::string_view s);

struct WaveformRecord {
  std::string waveform_id;
  WaveformKind kind = WaveformKind::earthquake;
  std::optional<std::string> source_id;  // earthquakes only
  double station_latitude = 0.0;
  double station_longitude = 0.0;
  double sampling_rate_hz = 100.0;
  std::optional<std::int64_t> p_arrival_index;  // earthquakes only
  std::optional<std::int64_t> s_arrival_index;
  std::int64_t n_samples = 0;
  std::optional<std::string> trace_ref;

  bool is_earthquake() const { return kind == WaveformKind::earthquake; }
  GeoPoint station() const { return {station_latitude, station_longitude}; }
  bool operator==(const WaveformRecord&) const = default;
};

// Throw ValidationError describing the first violated invariant.
void validate(const SourceRecord& source);
void validate(const WaveformRecord& waveform);

// Immutable, validated collection of sources and waveforms. Every earthquake
// waveform's source_id resolves; ids are unique within each record type.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<SourceRecord> sources, std::vector<WaveformRecord> waveforms);

  const std::vector<SourceRecord>& sources() const { return sources_; }
  const std::vector<WaveformRecord>& waveforms() const { return waveforms_; }

  const SourceRecord* find_source(std::string_view id) const;
  const WaveformRecord* find_waveform(std::string_view id) const;

  // Indices into waveforms() of the earthquake waveforms recorded for a source.
  const std::vector<std::size_t>& waveforms_of_source(std::string_view source_id) const;

  std::size_t earthquake_count() const;
  std::size_t noise_count() const;

  bool operator==(const Dataset& other) const {
    return sources_ == other.sources_ && waveforms_ == other.waveforms_;
  }

 private:
  std::vector<SourceRecord> sources_;
  std::vector<WaveformRecord> waveforms_;
  std::unordered_map<std::string, std::size_t> source_index_;
  std::unordered_map<std::string, std::size_t> waveform_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_source_;
};

// Newline-delimited JSON. First line {"schema":"picker-bench/1"}; then one
// record per line discriminated by "type": "source" | "waveform".
// An empty stream is an empty dataset. Errors carry the offending line number.
Dataset parse_metadata(std::istream& in);
Dataset load_metadata(const std::filesystem::path& path);

// Header, then sources, then waveforms, each in dataset order.
void write_metadata(std::ostream& out, const Dataset& dataset);
void save_metadata(const std::filesystem::path& path, const Dataset& dataset);

}  // namespace pbench

#endif  // PBENCH_DATASET_HPP_
