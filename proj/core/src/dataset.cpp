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

#include "pbench/dataset.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "pbench/atomic_file.hpp"
#include "pbench/error.hpp"

namespace pbench {

using nlohmann::ordered_json;

std::string_view to_string(WaveformKind kind) {
  return kind == WaveformKind::earthquake ? "earthquake" : "noise";
}

WaveformKind waveform_kind_from_string(std::string_view s) {
  if (s == "earthquake") return WaveformKind::earthquake;
  if (s == "noise") return WaveformKind::noise;
  throw ValidationError("unknown waveform kind '" + std::string(s) + "'");
}

namespace {

bool valid_latitude(double v) { return std::isfinite(v) && v >= -90.0 && v <= 90.0; }
bool valid_longitude(double v) { return std::isfinite(v) && v >= -180.0 && v <= 180.0; }

}  // namespace

void validate(const SourceRecord& s) {
  if (s.source_id.empty()) throw ValidationError("source with empty source_id");
  if (!valid_latitude(s.latitude))
    throw ValidationError("source '" + s.source_id + "': latitude out of range [-90, 90]");
  if (!valid_longitude(s.longitude))
    throw ValidationError("source '" + s.source_id +
                          "': longitude out of range [-180, 180]");
  if (s.depth_km && !(std::isfinite(*s.depth_km) && *s.depth_km >= 0.0))
    throw ValidationError("source '" + s.source_id + "': depth_km must be nonnegative");
  if (s.magnitude && !std::isfinite(*s.magnitude))
    throw ValidationError("source '" + s.source_id + "': magnitude not finite");
}

void validate(const WaveformRecord& w) {
  const std::string who = "waveform '" + w.waveform_id + "'";
  if (w.waveform_id.empty()) throw ValidationError("waveform with empty waveform_id");
  if (!valid_latitude(w.station_latitude))
    throw ValidationError(who + ": station_latitude out of range [-90, 90]");
  if (!valid_longitude(w.station_longitude))
    throw ValidationError(who + ": station_longitude out of range [-180, 180]");
  if (!(std::isfinite(w.sampling_rate_hz) && w.sampling_rate_hz > 0.0))
    throw ValidationError(who + ": sampling_rate_hz must be positive");
  if (w.n_samples <= 0) throw ValidationError(who + ": n_samples must be positive");
  if (w.is_earthquake()) {
    if (!w.source_id || w.source_id->empty())
      throw ValidationError(who + ": earthquake waveform requires source_id");
    if (!w.p_arrival_index)
      throw ValidationError(who + ": earthquake waveform requires p_arrival_index");
    if (*w.p_arrival_index < 0 || *w.p_arrival_index >= w.n_samples)
      throw ValidationError(who + ": p_arrival_index outside [0, n_samples)");
    if (w.s_arrival_index) {
      if (*w.s_arrival_index <= *w.p_arrival_index)
        throw ValidationError(who + ": s_arrival_index must exceed p_arrival_index");
      if (*w.s_arrival_index >= w.n_samples)
        throw ValidationError(who + ": s_arrival_index outside [0, n_samples)");
    }
  } else {
    if (w.source_id) throw ValidationError(who + ": noise waveform has a source_id");
    if (w.p_arrival_index || w.s_arrival_index)
      throw ValidationError(who + ": noise waveform has arrival indices");
  }
}

Dataset::Dataset(std::vector<SourceRecord> sources, std::vector<WaveformRecord> waveforms)
    : sources_(std::move(sources)), waveforms_(std::move(waveforms)) {
  for (std::size_t i = 0; i < sources_.size(); ++i) {
    validate(sources_[i]);
    if (!source_index_.emplace(sources_[i].source_id, i).second)
      throw ValidationError("duplicate source_id '" + sources_[i].source_id + "'");
  }
  for (std::size_t i = 0; i < waveforms_.size(); ++i) {
    const WaveformRecord& w = waveforms_[i];
    validate(w);
    if (!waveform_index_.emplace(w.waveform_id, i).second)
      throw ValidationError("duplicate waveform_id '" + w.waveform_id + "'");
    if (w.is_earthquake()) {
      if (!source_index_.contains(*w.source_id))
        throw ValidationError("waveform '" + w.waveform_id + "' references unknown source '" +
                              *w.source_id + "'");
      by_source_[*w.source_id].push_back(i);
    }
  }
}

const SourceRecord* Dataset::find_source(std::string_view id) const {
  auto it = source_index_.find(std::string(id));
  return it == source_index_.end() ? nullptr : &sources_[it->second];
}

const WaveformRecord* Dataset::find_waveform(std::string_view id) const {
  auto it = waveform_index_.find(std::string(id));
  return it == waveform_index_.end() ? nullptr : &waveforms_[it->second];
}

const std::vector<std::size_t>& Dataset::waveforms_of_source(std::string_view source_id) const {
  static const std::vector<std::size_t> kNone;
  auto it = by_source_.find(std::string(source_id));
  return it == by_source_.end() ? kNone : it->second;
}

std::size_t Dataset::earthquake_count() const {
  std::size_t n = 0;
  for (const auto& w : waveforms_) n += w.is_earthquake() ? 1 : 0;
  return n;
}

std::size_t Dataset::noise_count() const { return waveforms_.size() - earthquake_count(); }

namespace {

template <typename T>
T required(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null())
    throw ValidationError(std::string("missing field '") + key + "'");
  return it->get<T>();
}

template <typename T>
std::optional<T> optional_field(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

SourceRecord source_from_json(const ordered_json& j) {
  SourceRecord s;
  s.source_id = required<std::string>(j, "source_id");
  s.latitude = required<double>(j, "latitude");
  s.longitude = required<double>(j, "longitude");
  s.depth_km = optional_field<double>(j, "depth_km");
  s.magnitude = optional_field<double>(j, "magnitude");
  s.origin_time = optional_field<std::string>(j, "origin_time");
  return s;
}

WaveformRecord waveform_from_json(const ordered_json& j) {
  WaveformRecord w;
  w.waveform_id = required<std::string>(j, "waveform_id");
  w.kind = waveform_kind_from_string(required<std::string>(j, "kind"));
  w.source_id = optional_field<std::string>(j, "source_id");
  w.station_latitude = required<double>(j, "station_latitude");
  w.station_longitude = required<double>(j, "station_longitude");
  w.sampling_rate_hz = optional_field<double>(j, "sampling_rate_hz").value_or(100.0);
  w.p_arrival_index = optional_field<std::int64_t>(j, "p_arrival_index");
  w.s_arrival_index = optional_field<std::int64_t>(j, "s_arrival_index");
  w.n_samples = required<std::int64_t>(j, "n_samples");
  w.trace_ref = optional_field<std::string>(j, "trace_ref");
  return w;
}

ordered_json to_json(const SourceRecord& s) {
  ordered_json j;
  j["type"] = "source";
  j["source_id"] = s.source_id;
  j["latitude"] = s.latitude;
  j["longitude"] = s.longitude;
  if (s.depth_km) j["depth_km"] = *s.depth_km;
  if (s.magnitude) j["magnitude"] = *s.magnitude;
  if (s.origin_time) j["origin_time"] = *s.origin_time;
  return j;
}

ordered_json to_json(const WaveformRecord& w) {
  ordered_json j;
  j["type"] = "waveform";
  j["waveform_id"] = w.waveform_id;
  j["kind"] = to_string(w.kind);
  if (w.source_id) j["source_id"] = *w.source_id;
  j["station_latitude"] = w.station_latitude;
  j["station_longitude"] = w.station_longitude;
  j["sampling_rate_hz"] = w.sampling_rate_hz;
  if (w.p_arrival_index) j["p_arrival_index"] = *w.p_arrival_index;
  if (w.s_arrival_index) j["s_arrival_index"] = *w.s_arrival_index;
  j["n_samples"] = w.n_samples;
  if (w.trace_ref) j["trace_ref"] = *w.trace_ref;
  return j;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

Dataset parse_metadata(std::istream& in) {
  std::vector<SourceRecord> sources;
  std::vector<WaveformRecord> waveforms;
  std::unordered_set<std::string> source_ids;
  std::unordered_set<std::string> waveform_ids;
  std::vector<std::size_t> waveform_lines;
  bool seen_header = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw FormatError("record is not a JSON object", line_no);
    try {
      if (!seen_header) {
        auto it = j.find("schema");
        if (it == j.end() || !it->is_string())
          throw ValidationError("expected schema header line");
        if (it->get<std::string>() != kMetadataSchema)
          throw ValidationError("unsupported schema '" + it->get<std::string>() + "'");
        seen_header = true;
        continue;
      }
      const auto type = required<std::string>(j, "type");
      if (type == "source") {
        SourceRecord s = source_from_json(j);
        validate(s);
        if (!source_ids.insert(s.source_id).second)
          throw ValidationError("duplicate source_id '" + s.source_id + "'");
        sources.push_back(std::move(s));
      } else if (type == "waveform") {
        WaveformRecord w = waveform_from_json(j);
        validate(w);
        if (!waveform_ids.insert(w.waveform_id).second)
          throw ValidationError("duplicate waveform_id '" + w.waveform_id + "'");
        waveforms.push_back(std::move(w));
        waveform_lines.push_back(line_no);
      } else {
        throw ValidationError("unknown record type '" + type + "'");
      }
    } catch (const ValidationError& e) {
      throw FormatError(e.what(), line_no);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad field: ") + e.what(), line_no);
    }
  }
  for (std::size_t i = 0; i < waveforms.size(); ++i) {
    const auto& w = waveforms[i];
    if (w.source_id && !source_ids.contains(*w.source_id))
      throw FormatError("waveform '" + w.waveform_id + "' references unknown source '" +
                            *w.source_id + "'",
                        waveform_lines[i]);
  }
  return Dataset(std::move(sources), std::move(waveforms));
}

Dataset load_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metadata file: " + path.string());
  return parse_metadata(in);
}

void write_metadata(std::ostream& out, const Dataset& dataset) {
  out << ordered_json{{"schema", std::string(kMetadataSchema)}}.dump() << '\n';
  for (const auto& s : dataset.sources()) out << to_json(s).dump() << '\n';
  for (const auto& w : dataset.waveforms()) out << to_json(w).dump() << '\n';
}

void save_metadata(const std::filesystem::path& path, const Dataset& dataset) {
  write_file_atomic(path, [&](std::ostream& out) { write_metadata(out, dataset); });
}

}  // namespace pbench
