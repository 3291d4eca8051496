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

#ifndef PBENCH_SERIALIZE_HPP_
#define PBENCH_SERIALIZE_HPP_

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pbench/design.hpp"
#include "pbench/error.hpp"
#include "pbench/metrics.hpp"
#include "pbench/picker_eval.hpp"
#include "pbench/ranksim.hpp"
#include "pbench/statframe.hpp"
#include "pbench/stratify.hpp"
#include "pbench/synth.hpp"

namespace pbench {

// Insertion-ordered, so emitted documents keep a fixed key order.
using Json = nlohmann::ordered_json;

std::string join_path(std::string_view path, std::string_view key);

// Throws FieldError naming `path.key` when absent.
const Json& require_field(const Json& obj, std::string_view key, std::string_view path);

template <class T>
T get_field(const Json& obj, std::string_view key, std::string_view path) {
  const Json& v = require_field(obj, key, path);
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FieldError(join_path(path, key), std::string("wrong type (") + e.what() + ")");
  }
}

template <class T>
T get_field_or(const Json& obj, std::string_view key, std::string_view path, T fallback) {
  if (!obj.is_object() || !obj.contains(std::string(key))) return fallback;
  return get_field<T>(obj, key, path);
}

// Serialized document of `j` with a trailing newline; stable across runs.
std::string dump_document(const Json& j);

Json serialize(const DesignSpec& design);
DesignSpec parse_design(const Json& j, std::string_view path = "design");

Json serialize(const KMeansOptions& options);
KMeansOptions parse_kmeans_options(const Json& j, std::uint64_t seed,
                                   std::string_view path = "cluster");

Json serialize(const SplitConfig& config);
SplitConfig parse_split_config(const Json& j, std::string_view path = "split");

Json serialize(const ClusterModel& model);
ClusterModel parse_cluster_model(const Json& j, std::string_view path = "cluster_model");

Json serialize(const SplitPlan& plan);
SplitPlan parse_split_plan(const Json& j, std::string_view path = "split_plan");

Json serialize(const std::vector<ClusterSet>& sets);
std::vector<ClusterSet> parse_cluster_sets(const Json& j, std::string_view path = "cluster_sets");

// {metric_name, design, values}; missing entries are null.
Json serialize(const MetricTable& table);
MetricTable parse_metric_table(const Json& j, std::string_view path = "metric_table");

// {metric_name, design, grid, values: one flat array per grid point}.
Json serialize(const FunctionalMetricTable& table);
FunctionalMetricTable parse_functional_table(const Json& j,
                                             std::string_view path = "functional_table");
bool is_functional_table(const Json& j);

Json serialize(const FitOptions& options);
FitOptions parse_fit_options(const Json& j, std::string_view path = "fit");

Json serialize(const Interval& interval);
Json serialize(const VarianceEstimate& estimate);
Json serialize(const FitResult& result);

Json serialize(const RankOptions& options);
RankOptions parse_rank_options(const Json& j, std::uint64_t seed, std::string_view path = "rank");
Json serialize(const RankMatrix& matrix);

Json serialize(const SynthTraceParams& params);
SynthTraceParams parse_synth_trace_params(const Json& j, std::uint64_t seed,
                                          std::string_view path);

Json serialize(const GeoDatasetParams& params);
GeoDatasetParams parse_geo_params(const Json& j, std::uint64_t seed, std::string_view path);

Json serialize(const MetricModelParams& params);
MetricModelParams parse_metric_model(const Json& j, std::string_view path);

Json serialize(const Pick& pick);
Json serialize(const WaveformCounts& counts);
Json serialize(const AggregateCounts& counts);
Json serialize(const CumulativeRmsrCurve& curve);
Json serialize(const ThresholdSelection& selection);

// One NDJSON line per trace: {waveform_id, values, coverage}.
Json serialize(const ProbabilityTrace& trace);
ProbabilityTrace parse_probability_trace(const Json& j, std::string_view path = "trace");
void write_probability_traces(std::ostream& out, std::span<const ProbabilityTrace> traces);
std::vector<ProbabilityTrace> parse_probability_traces(std::istream& in);

}  // namespace pbench

#endif  // PBENCH_SERIALIZE_HPP_
