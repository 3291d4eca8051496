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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pbench/atomic_file.hpp"
#include "pbench/csv.hpp"
#include "pbench/diagnostics.hpp"
#include "pbench/metrics.hpp"
#include "pbench/picker_eval.hpp"
#include "pbench/ranksim.hpp"
#include "pbench/rng.hpp"
#include "pbench/statframe.hpp"
#include "pbench/stratify.hpp"
#include "pbench/synth.hpp"
#include "pbench/trace_io.hpp"
#include "pbench_cli/cli.hpp"

namespace pbench::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMetadata = "synth/metadata.ndjson";
constexpr const char* kWindows = "synth/windows.ndjson";
constexpr const char* kClusterModel = "cluster/cluster_model.json";
constexpr const char* kSplitPlan = "split/split_plan.json";
constexpr const char* kTraces = "eval/traces.ndjson";
constexpr const char* kThreshold = "eval/threshold.json";

class Outputs {
 public:
  explicit Outputs(fs::path root) : root_(std::move(root)) {}

  void text(const std::string& rel, std::string_view bytes) {
    write_file_atomic(root_ / rel, bytes);
    written_.push_back(rel);
  }
  void json(const std::string& rel, const Json& j) { text(rel, dump_document(j)); }
  void csv(const std::string& rel, const CsvWriter& w) { text(rel, w.str()); }

  void note(std::string entry) { written_.push_back(std::move(entry)); }
  std::vector<std::string> take() { return std::move(written_); }

 private:
  fs::path root_;
  std::vector<std::string> written_;
};

Json load_json(const fs::path& p) {
  try {
    return Json::parse(read_file(p));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

// Metric names become file stems.
std::string file_stem(std::string_view name) {
  std::string s;
  for (char c : name) s += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
  return s.empty() ? "metric" : s;
}

std::int64_t as_i64(int v) { return v; }

// ----- synth

MetricModelParams default_metric_model(const DesignSpec& d, double mean, double model_span,
                                       double quantity_span, double var_data, double var_train) {
  MetricModelParams p;
  p.grand_mean = mean;
  const int M = d.models, A = d.quantities();
  for (int m = 0; m < M; ++m) p.model_effects.push_back(M > 1 ? model_span * (1.0 - 2.0 * m / (M - 1)) : 0.0);
  for (int a = 0; a < A; ++a)
    p.quantity_effects.push_back(A > 1 ? quantity_span * (2.0 * a / (A - 1) - 1.0) : 0.0);
  p.var_data = {var_data};
  p.var_train = {var_train};
  return p;
}

std::map<std::string, MetricModelParams> metric_models(const RunConfig& c, const Json& synth) {
  const DesignSpec d = c.design();
  std::map<std::string, MetricModelParams> out;
  if (synth.contains("metrics")) {
    const Json& m = synth.at("metrics");
    if (!m.is_object()) throw FieldError("synth.metrics", "expected an object");
    for (auto it = m.begin(); it != m.end(); ++it)
      out.emplace(it.key(), parse_metric_model(it.value(), "synth.metrics." + it.key()));
    return out;
  }
  out.emplace("recall", default_metric_model(d, 0.8, 0.02, 0.05, 4e-4, 1e-4));
  out.emplace("f1", default_metric_model(d, 0.75, 0.02, 0.04, 3e-4, 1e-4));
  out.emplace("noise_percent_correct", default_metric_model(d, 0.9, 0.01, 0.02, 1e-4, 5e-5));
  // Ratio of cumulative RMSR to its cutoff; lower is better.
  out.emplace("cumulative_rmsr", default_metric_model(d, 0.55, -0.02, -0.03, 1e-4, 5e-5));
  return out;
}

std::vector<std::string> cmd_synth(const RunConfig& c) {
  Outputs out(c.out_dir);
  const Json s = c.section("synth");
  // Desk-scale defaults: the library's 60 s waveforms with 30 s windows
  // would write about a gigabyte of window outputs.
  Json geo_json = Json{{"sources_per_cluster", 60}, {"waveforms_per_source", 1}, {"n_samples", 1500}};
  if (s.contains("geo")) {
    if (!s.at("geo").is_object()) throw FieldError("synth.geo", "expected an object");
    for (auto it = s.at("geo").begin(); it != s.at("geo").end(); ++it) geo_json[it.key()] = it.value();
  }
  const Json trace_json = s.contains("trace") ? s.at("trace") : Json::object();
  GeoDatasetParams gp = parse_geo_params(geo_json, c.seed_for("synth.geo"), "synth.geo");
  const bool write_traces = get_field_or<bool>(s, "write_traces", "synth", false);
  const DesignSpec design = c.design();
  const auto models = metric_models(c, s);
  const auto rmsr_grid = get_field_or<std::vector<double>>(c.doc, "rmsr_grid", "", default_rmsr_grid());
  const auto tp = parse_synth_trace_params(trace_json, c.seed_for("synth.trace"), "synth.trace");
  tp.validate();
  for (const auto& [name, params] : models) params.validate(design);
  const auto window = get_field_or<std::int64_t>(s, "window_samples", "synth", 750);
  const auto stride = get_field_or<std::int64_t>(s, "stride_samples", "synth", 375);
  if (write_traces) gp.trace_dir = "traces";
  const auto g = gen_geo_dataset(gp);

  std::ostringstream meta;
  write_metadata(meta, g.dataset);
  out.text(kMetadata, meta.str());

  Json truth = Json::object();
  Json centers = Json::array();
  for (const auto& p : g.centers) centers.push_back({p.latitude, p.longitude});
  truth["centers"] = centers;
  truth["source_blob"] = g.source_blob;
  truth["noise_blob"] = g.noise_blob;
  truth["geo"] = serialize(gp);
  out.json("synth/truth.json", truth);

  std::ostringstream windows;
  for (const auto& w : g.dataset.waveforms()) {
    const auto ws = gen_window_outputs(gen_trace(w, tp), window, stride);
    write_window_outputs(windows, ws);
  }
  out.text(kWindows, windows.str());

  if (write_traces) {
    SeismogramParams sp;
    sp.seed = c.seed_for("synth.seismogram");
    for (const auto& w : g.dataset.waveforms()) save_trace(c.out_dir / "synth" / *w.trace_ref, gen_seismogram(w, sp));
    out.note("synth/traces/ (" + std::to_string(g.dataset.waveforms().size()) + " files)");
  }

  for (const auto& [name, params] : models) {
    const auto table = gen_metrics(name, design, params, c.seed_for("synth.metrics." + name));
    if (name != "cumulative_rmsr") {
      out.json("synth/tables/" + file_stem(name) + ".json", serialize(table));
      continue;
    }
    FunctionalMetricTable f;
    f.metric_name = name;
    f.grid = rmsr_grid;
    for (double cutoff : rmsr_grid) {
      MetricTable t(name, design);
      for (const auto& k : enumerate_instances(design))
        t.set(k, cutoff * std::clamp(table.at(k), 0.0, 1.0));
      f.tables.push_back(std::move(t));
    }
    out.json("synth/tables/" + file_stem(name) + ".json", serialize(f));
  }
  return out.take();
}

// ----- cluster / split / sample-sets

KMeansOptions kmeans_options(const RunConfig& c) {
  Json j = c.section("cluster");
  if (!j.contains("k")) j["k"] = KMeansOptions{}.k;
  return parse_kmeans_options(j, c.seed_for("cluster"), "cluster");
}

std::vector<std::string> cmd_cluster(const RunConfig& c) {
  Outputs out(c.out_dir);
  const Dataset d = load_metadata(c.input("metadata", kMetadata));
  const ClusterModel m = cluster_dataset(d, kmeans_options(c));
  out.json(kClusterModel, serialize(m));
  CsvWriter w({"source_id", "latitude", "longitude", "cluster"});
  for (const auto& s : d.sources())
    w.row({s.source_id, s.latitude, s.longitude, as_i64(m.source_cluster.at(s.source_id))});
  out.csv("cluster/assignments.csv", w);
  CsvWriter inertia({"iteration", "inertia"});
  for (std::size_t i = 0; i < m.inertia_history.size(); ++i)
    inertia.row({static_cast<std::int64_t>(i + 1), m.inertia_history[i]});
  out.csv("cluster/inertia.csv", inertia);
  return out.take();
}

ClusterModel cluster_model_for(const RunConfig& c, const Dataset& d) {
  if (c.doc.contains("cluster_model") || c.has_input("cluster_model", kClusterModel)) {
    ClusterModel m = parse_cluster_model(load_json(c.input("cluster_model", kClusterModel)));
    assign_dataset(m, d);
    return m;
  }
  return cluster_dataset(d, kmeans_options(c));
}

std::vector<std::string> cmd_split(const RunConfig& c) {
  Outputs out(c.out_dir);
  const Dataset d = load_metadata(c.input("metadata", kMetadata));
  const ClusterModel m = cluster_model_for(c, d);
  const SplitConfig sc = parse_split_config(c.section("split"), "split");
  const SplitPlan plan = build_split_plan(d, m, sc, c.seed_for("split"));
  out.json(kSplitPlan, serialize(plan));
  CsvWriter w({"region", "cluster", "sources", "earthquake_waveforms", "noise_waveforms"});
  auto region = [&](const std::string& name, const std::vector<int>& clusters, const RegionSummary& r) {
    for (int k : clusters) w.row({name, as_i64(k), std::string(), std::string(), std::string()});
    w.row({name, std::string("all"), static_cast<std::int64_t>(r.source_ids.size()),
           static_cast<std::int64_t>(r.earthquake_waveforms), static_cast<std::int64_t>(r.noise_waveforms)});
  };
  region("test_north", plan.test_clusters_north, plan.test_north);
  region("test_south", plan.test_clusters_south, plan.test_south);
  for (const auto& [k, pool] : plan.training_pools) {
    std::int64_t quakes = 0;
    for (const auto& s : pool.sources) quakes += static_cast<std::int64_t>(s.waveform_ids.size());
    w.row({std::string("training"), as_i64(k), static_cast<std::int64_t>(pool.sources.size()), quakes,
           static_cast<std::int64_t>(pool.noise_waveform_ids.size())});
  }
  out.csv("split/regions.csv", w);
  return out.take();
}

std::vector<std::string> cmd_sample_sets(const RunConfig& c) {
  Outputs out(c.out_dir);
  const SplitPlan plan = parse_split_plan(load_json(c.input("split_plan", kSplitPlan)));
  std::optional<int> per_cluster;
  if (c.doc.contains("sources_per_cluster"))
    per_cluster = get_field<int>(c.doc, "sources_per_cluster", "");
  const auto sets = sample_cluster_sets(plan, c.design(), per_cluster, c.seed_for("sample-sets"));
  out.json("split/cluster_sets.json", serialize(sets));
  return out.take();
}

// ----- aggregate / pick / score / threshold

std::vector<ProbabilityTrace> aggregate_file(const fs::path& windows_path, const Dataset& d) {
  auto groups = group_by_waveform(load_window_outputs(windows_path));
  std::vector<ProbabilityTrace> traces;
  traces.reserve(groups.size());
  for (auto& [id, ws] : groups) {
    const WaveformRecord* w = d.find_waveform(id);
    if (!w) throw ValidationError("windows reference unknown waveform '" + id + "'");
    traces.push_back(aggregate_windows(ws, w->n_samples));
  }
  return traces;
}

std::vector<ProbabilityTrace> load_traces(const RunConfig& c) {
  std::ifstream in(c.input("traces", kTraces));
  return parse_probability_traces(in);
}

double threshold_for(const RunConfig& c) {
  if (!c.doc.contains("threshold")) return 0.5;
  const Json& t = c.doc.at("threshold");
  if (t.is_string() && t.get<std::string>() == "selected")
    return get_field<double>(load_json(c.input("threshold_file", kThreshold)), "threshold", "threshold_file");
  if (!t.is_number()) throw FieldError("threshold", "expected a number or \"selected\"");
  return t.get<double>();
}

double half_width(const RunConfig& c) {
  return get_field_or<double>(c.doc, "tp_half_width_s", "", kDefaultTpHalfWidthSeconds);
}

std::vector<std::string> cmd_aggregate(const RunConfig& c) {
  Outputs out(c.out_dir);
  const Dataset d = load_metadata(c.input("metadata", kMetadata));
  const auto traces = aggregate_file(c.input("windows", kWindows), d);
  std::ostringstream s;
  write_probability_traces(s, traces);
  out.text(kTraces, s.str());
  return out.take();
}

std::vector<std::string> cmd_pick(const RunConfig& c) {
  Outputs out(c.out_dir);
  const double thr = threshold_for(c);
  const Dataset d = load_metadata(c.input("metadata", kMetadata));
  CsvWriter w({"waveform_id", "sample_index", "time_s", "probability"});
  for (const auto& t : load_traces(c)) {
    const WaveformRecord* rec = d.find_waveform(t.waveform_id);
    if (!rec) throw ValidationError("trace for unknown waveform '" + t.waveform_id + "'");
    for (const auto& p : extract_picks(t, thr))
      w.row({p.waveform_id, p.sample_index, static_cast<double>(p.sample_index) / rec->sampling_rate_hz,
             p.probability});
  }
  out.csv("eval/picks.csv", w);
  return out.take();
}

// Waveform ids to score, or nullopt for every waveform.
std::optional<std::set<std::string>> score_subset(const RunConfig& c) {
  const auto on = get_field_or<std::string>(c.doc, "score_on", "", "all");
  if (on == "all") return std::nullopt;
  if (on != "test" && on != "validation") throw FieldError("score_on", "expected all, test or validation");
  const SplitPlan plan = parse_split_plan(load_json(c.input("split_plan", kSplitPlan)));
  const auto& ids = on == "test" ? plan.test_members : plan.validation_members;
  return std::set<std::string>(ids.begin(), ids.end());
}

struct Score {
  AggregateCounts counts;
  std::vector<WaveformCounts> per_waveform;
  std::vector<double> residuals;
};

Score score_traces(const std::vector<ProbabilityTrace>& traces, const Dataset& d,
                   const std::optional<std::set<std::string>>& subset, double thr, double hw) {
  Score s;
  for (const auto& t : traces) {
    if (subset && !subset->contains(t.waveform_id)) continue;
    const WaveformRecord* rec = d.find_waveform(t.waveform_id);
    if (!rec) throw ValidationError("trace for unknown waveform '" + t.waveform_id + "'");
    s.per_waveform.push_back(score_waveform(t, *rec, thr, hw));
    const auto& r = s.per_waveform.back().residuals_s;
    s.residuals.insert(s.residuals.end(), r.begin(), r.end());
  }
  s.counts = accumulate(s.per_waveform);
  return s;
}

Json optional_json(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

// Per-instance window files named in config.instances fill metric tables.
void score_instances(const RunConfig& c, const Dataset& d, const std::optional<std::set<std::string>>& subset,
                     double thr, double hw, const std::vector<double>& grid, Outputs& out) {
  const Json& inst = c.doc.at("instances");
  if (!inst.is_array()) throw FieldError("instances", "expected an array");
  const DesignSpec design = c.design();
  MetricTable recall_t("recall", design), f1_t("f1", design), noise_t("noise_percent_correct", design);
  FunctionalMetricTable rmsr_t;
  rmsr_t.metric_name = "cumulative_rmsr";
  rmsr_t.grid = grid;
  rmsr_t.tables.assign(grid.size(), MetricTable("cumulative_rmsr", design));
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const std::string path = "instances[" + std::to_string(i) + "]";
    const Json& e = inst[i];
    const ModelInstanceKey key{get_field<int>(e, "model", path), get_field<int>(e, "quantity", path),
                               get_field<int>(e, "cluster_set", path), get_field<int>(e, "init", path)};
    const fs::path windows = c.resolve(get_field<std::string>(e, "windows", path));
    if (!fs::exists(windows)) throw MissingInputError(join_path(path, "windows"), windows);
    const Score s = score_traces(aggregate_file(windows, d), d, subset, thr, hw);
    auto put = [&](MetricTable& t, std::optional<double> v) {
      if (v) t.set(key, *v);
    };
    put(recall_t, try_recall(s.counts));
    put(f1_t, try_f1(s.counts));
    put(noise_t, try_noise_percent_correct(s.counts));
    const auto curve = cumulative_rmsr(s.residuals, grid);
    for (std::size_t j = 0; j < grid.size(); ++j)
      if (!curve.masked(j)) rmsr_t.tables[j].set(key, curve.values[j]);
  }
  out.json("eval/tables/recall.json", serialize(recall_t));
  out.json("eval/tables/f1.json", serialize(f1_t));
  out.json("eval/tables/noise_percent_correct.json", serialize(noise_t));
  out.json("eval/tables/cumulative_rmsr.json", serialize(rmsr_t));
}

std::vector<std::string> cmd_score(const RunConfig& c) {
  Outputs out(c.out_dir);
  const double thr = threshold_for(c);
  const double hw = half_width(c);
  const auto grid = get_field_or<std::vector<double>>(c.doc, "rmsr_grid", "", default_rmsr_grid());
  const Dataset d = load_metadata(c.input("metadata", kMetadata));
  const auto subset = score_subset(c);
  if (c.doc.contains("instances")) {
    score_instances(c, d, subset, thr, hw, grid, out);
    return out.take();
  }
  const Score s = score_traces(load_traces(c), d, subset, thr, hw);
  const auto curve = cumulative_rmsr(s.residuals, grid);
  Json j = Json::object();
  j["threshold"] = thr;
  j["tp_half_width_s"] = hw;
  j["score_on"] = get_field_or<std::string>(c.doc, "score_on", "", "all");
  j["counts"] = serialize(s.counts);
  j["recall"] = optional_json(try_recall(s.counts));
  j["f1"] = optional_json(try_f1(s.counts));
  j["noise_percent_correct"] = optional_json(try_noise_percent_correct(s.counts));
  j["cumulative_rmsr"] = serialize(curve);
  out.json("eval/scores.json", j);

  CsvWriter w({"waveform_id", "kind", "tp", "fp", "fn", "residual_s"});
  for (const auto& p : s.per_waveform)
    w.row({p.waveform_id, std::string(to_string(p.kind)), as_i64(p.tp), as_i64(p.fp), as_i64(p.fn),
           p.residuals_s.empty() ? std::optional<double>{} : std::optional<double>{p.residuals_s[0]}});
  out.csv("eval/waveform_counts.csv", w);
  CsvWriter r({"cutoff_s", "rmsr_s", "count"});
  for (std::size_t k = 0; k < curve.grid.size(); ++k)
    r.row({curve.grid[k], curve.masked(k) ? std::optional<double>{} : std::optional<double>{curve.values[k]},
           curve.counts[k]});
  out.csv("eval/cumulative_rmsr.csv", r);
  return out.take();
}

std::vector<std::string> cmd_threshold(const RunConfig& c) {
  Outputs out(c.out_dir);
  const Dataset d = load_metadata(c.input("metadata", kMetadata));
  const SplitPlan plan = parse_split_plan(load_json(c.input("split_plan", kSplitPlan)));
  const std::set<std::string> members(plan.validation_members.begin(), plan.validation_members.end());
  std::vector<LabeledTrace> validation;
  for (auto& t : load_traces(c)) {
    if (!members.contains(t.waveform_id)) continue;
    const WaveformRecord* rec = d.find_waveform(t.waveform_id);
    if (!rec) throw ValidationError("trace for unknown waveform '" + t.waveform_id + "'");
    validation.push_back({std::move(t), *rec});
  }
  const auto grid = get_field_or<std::vector<double>>(c.doc, "threshold_grid", "", default_threshold_grid());
  const auto sel = select_threshold(validation, grid, half_width(c));
  out.json(kThreshold, serialize(sel));
  CsvWriter w({"threshold", "objective"});
  for (std::size_t k = 0; k < sel.grid.size(); ++k) w.row({sel.grid[k], sel.objectives[k]});
  out.csv("eval/threshold_objective.csv", w);
  return out.take();
}

// ----- fit / rank / report

struct LoadedTable {
  std::string name;
  std::optional<MetricTable> scalar;
  std::optional<FunctionalMetricTable> functional;
};

std::vector<fs::path> table_paths(const RunConfig& c) {
  std::vector<fs::path> paths;
  if (c.doc.contains("metric_tables")) {
    const auto names = get_field<std::vector<std::string>>(c.doc, "metric_tables", "");
    for (std::size_t i = 0; i < names.size(); ++i) {
      const fs::path p = c.resolve(names[i]);
      if (!fs::exists(p)) throw MissingInputError("metric_tables[" + std::to_string(i) + "]", p);
      paths.push_back(p);
    }
    return paths;
  }
  for (const char* dir : {"synth/tables", "eval/tables"}) {
    const fs::path root = c.out_dir / dir;
    if (!fs::is_directory(root)) continue;
    std::vector<fs::path> found;
    for (const auto& e : fs::directory_iterator(root))
      if (e.is_regular_file() && e.path().extension() == ".json") found.push_back(e.path());
    std::sort(found.begin(), found.end());
    paths.insert(paths.end(), found.begin(), found.end());
  }
  if (paths.empty()) throw MissingInputError("metric_tables", c.out_dir / "synth/tables");
  return paths;
}

std::vector<LoadedTable> load_tables(const RunConfig& c) {
  std::vector<LoadedTable> out;
  for (const auto& p : table_paths(c)) {
    const Json j = load_json(p);
    LoadedTable t;
    if (is_functional_table(j)) {
      t.functional = parse_functional_table(j);
      t.name = t.functional->metric_name;
    } else {
      t.scalar = parse_metric_table(j);
      t.name = t.scalar->metric_name();
    }
    out.push_back(std::move(t));
  }
  return out;
}

FitOptions fit_options(const RunConfig& c) { return parse_fit_options(c.section("fit"), "fit"); }

Direction direction_for(const RunConfig& c, const std::string& metric) {
  const Json r = c.section("rank");
  if (r.contains("directions") && r.at("directions").contains(metric))
    return direction_from_string(get_field<std::string>(r.at("directions"), metric, "rank.directions"));
  return metric.find("rmsr") != std::string::npos ? Direction::lower_is_better : Direction::higher_is_better;
}

std::vector<RankMatrix> rank_table(const RunConfig& c, const MetricTable& t) {
  const RankOptions base = parse_rank_options(c.section("rank"), c.seed_for("rank." + t.metric_name()), "rank");
  std::vector<RankMatrix> out;
  for (int a = 0; a < t.design().quantities(); ++a) {
    RankOptions o = base;
    o.seed = derive_seed(base.seed, {static_cast<std::uint64_t>(a)});
    auto r = rank_probabilities(scores_for_quantity(t, a), direction_for(c, t.metric_name()), o);
    r.metric_name = t.metric_name();
    out.push_back(std::move(r));
  }
  return out;
}

void cell_rows(CsvWriter& w, const std::string& metric, const FitResult& f, bool with_metric) {
  for (const auto& cell : f.cells) {
    const std::int64_t level = f.design.quantity_levels[cell.quantity];
    if (!cell.observed) continue;
    const auto& v = cell.variance;
    if (with_metric)
      w.row({metric, as_i64(cell.model), level, cell.mean, cell.mean_ci.low, cell.mean_ci.high});
    else
      w.row({as_i64(cell.model), level, cell.mean, cell.mean_ci.low, cell.mean_ci.high, v.train.estimate,
             v.train.ci.low, v.train.ci.high, v.data.estimate, v.data.ci.low, v.data.ci.high,
             std::string(v.data.negative ? "true" : "false")});
  }
}

void qq_rows(CsvWriter& w, const std::string& metric, const FitResult& f) {
  const auto add = [&](const std::string& kind, const std::vector<double>& r) {
    if (r.size() < 3) return;
    for (const auto& p : qq_data(r)) w.row({metric, kind, p.theoretical, p.sample});
  };
  add("train", residual_values(f.residuals_train));
  add("data", residual_values(f.residuals_data));
}

void curve_rows(CsvWriter& w, const std::string& metric, const FunctionalMetricTable& t,
                const std::vector<FitResult>& fits) {
  for (std::size_t g = 0; g < fits.size(); ++g)
    for (const auto& cell : fits[g].cells)
      w.row({metric, t.grid[g], as_i64(cell.model), as_i64(t.tables[g].design().quantity_levels[cell.quantity]),
             cell.observed ? std::optional<double>{cell.mean} : std::nullopt,
             cell.observed ? std::optional<double>{cell.mean_ci.low} : std::nullopt,
             cell.observed ? std::optional<double>{cell.mean_ci.high} : std::nullopt});
}

Json functional_fit_json(const FunctionalMetricTable& t, const std::vector<FitResult>& fits) {
  Json j = Json::object();
  j["metric_name"] = t.metric_name;
  j["grid"] = t.grid;
  Json arr = Json::array();
  for (const auto& f : fits) arr.push_back(serialize(f));
  j["fits"] = arr;
  return j;
}

std::vector<std::string> cmd_fit(const RunConfig& c) {
  Outputs out(c.out_dir);
  const FitOptions opt = fit_options(c);
  for (const auto& t : load_tables(c)) {
    const std::string stem = "fit/" + file_stem(t.name);
    if (t.functional) {
      const auto fits = functional_fit(*t.functional, opt);
      out.json(stem + ".json", functional_fit_json(*t.functional, fits));
      CsvWriter w({"metric", "cutoff_s", "model", "quantity_level", "mean", "ci_low", "ci_high"});
      curve_rows(w, t.name, *t.functional, fits);
      out.csv(stem + "_curve.csv", w);
      continue;
    }
    const FitResult f = fit(*t.scalar, opt);
    out.json(stem + ".json", serialize(f));
    CsvWriter cells({"model", "quantity_level", "mean", "mean_ci_low", "mean_ci_high", "var_train",
                     "var_train_ci_low", "var_train_ci_high", "var_data", "var_data_ci_low", "var_data_ci_high",
                     "var_data_negative"});
    cell_rows(cells, t.name, f, false);
    out.csv(stem + "_cells.csv", cells);
    CsvWriter qq({"metric", "residual", "theoretical", "sample"});
    qq_rows(qq, t.name, f);
    out.csv(stem + "_qq.csv", qq);
  }
  return out.take();
}

Json rank_json(const MetricTable& t, const std::vector<RankMatrix>& ranks) {
  Json j = Json::object();
  j["metric_name"] = t.metric_name();
  Json levels = Json::array();
  for (std::size_t a = 0; a < ranks.size(); ++a)
    levels.push_back({{"quantity_level", t.design().quantity_levels[a]}, {"ranks", serialize(ranks[a])}});
  j["levels"] = levels;
  return j;
}

void rank_rows(CsvWriter& w, const MetricTable& t, const std::vector<RankMatrix>& ranks) {
  for (std::size_t a = 0; a < ranks.size(); ++a)
    for (int m = 0; m < ranks[a].models; ++m)
      for (int k = 0; k < ranks[a].models; ++k)
        w.row({t.metric_name(), as_i64(t.design().quantity_levels[a]), as_i64(m), as_i64(k + 1),
               ranks[a].at(m, k)});
}

std::vector<std::string> cmd_rank(const RunConfig& c) {
  Outputs out(c.out_dir);
  for (const auto& t : load_tables(c)) {
    if (!t.scalar) continue;
    const auto ranks = rank_table(c, *t.scalar);
    out.json("rank/" + file_stem(t.name) + ".json", rank_json(*t.scalar, ranks));
    CsvWriter w({"metric", "quantity_level", "model", "rank", "probability"});
    rank_rows(w, *t.scalar, ranks);
    out.csv("rank/" + file_stem(t.name) + ".csv", w);
  }
  return out.take();
}

std::vector<std::string> cmd_report(const RunConfig& c) {
  Outputs out(c.out_dir);
  const FitOptions opt = fit_options(c);
  CsvWriter curves({"metric", "model", "quantity_level", "mean", "ci_low", "ci_high"});
  CsvWriter variance({"metric", "model", "quantity_level", "component", "estimate", "ci_low", "ci_high"});
  CsvWriter ranks_csv({"metric", "quantity_level", "model", "rank", "probability"});
  CsvWriter qq({"metric", "residual", "theoretical", "sample"});
  CsvWriter rmsr({"metric", "cutoff_s", "model", "quantity_level", "mean", "ci_low", "ci_high"});
  Json metrics = Json::array();
  for (const auto& t : load_tables(c)) {
    if (t.functional) {
      const auto fits = functional_fit(*t.functional, opt);
      curve_rows(rmsr, t.name, *t.functional, fits);
      metrics.push_back({{"metric_name", t.name}, {"functional", true}, {"grid", t.functional->grid}});
      continue;
    }
    const FitResult f = fit(*t.scalar, opt);
    cell_rows(curves, t.name, f, true);
    std::size_t negative = 0;
    for (const auto& cell : f.cells) {
      const std::int64_t level = f.design.quantity_levels[cell.quantity];
      const auto& v = cell.variance;
      variance.row({t.name, as_i64(cell.model), level, std::string("train"), v.train.estimate, v.train.ci.low,
                    v.train.ci.high});
      // Negative estimates have no bar; they stay in the summary.
      if (v.data.negative) {
        ++negative;
        continue;
      }
      variance.row({t.name, as_i64(cell.model), level, std::string("data"), v.data.estimate, v.data.ci.low,
                    v.data.ci.high});
    }
    qq_rows(qq, t.name, f);
    const auto ranks = rank_table(c, *t.scalar);
    rank_rows(ranks_csv, *t.scalar, ranks);
    Json m = Json::object();
    m["metric_name"] = t.name;
    m["functional"] = false;
    m["direction"] = std::string(to_string(direction_for(c, t.name)));
    m["grand_mean"] = f.grand_mean;
    m["model_effects"] = f.model_effects;
    m["quantity_effects"] = f.quantity_effects;
    m["negative_var_data_cells"] = negative;
    m["qq_correlation_train"] = qq_correlation(qq_data(residual_values(f.residuals_train)));
    m["ranks"] = rank_json(*t.scalar, ranks).at("levels");
    metrics.push_back(std::move(m));
  }
  Json summary = Json::object();
  summary["seed"] = c.seed;
  summary["design"] = serialize(c.design());
  summary["fit_options"] = serialize(opt);
  summary["metrics"] = metrics;
  if (fs::exists(c.out_dir / "eval/scores.json")) summary["scores"] = load_json(c.out_dir / "eval/scores.json");
  if (fs::exists(c.out_dir / kThreshold)) summary["threshold"] = load_json(c.out_dir / kThreshold);
  out.json("report/summary.json", summary);
  out.csv("report/learning_curves.csv", curves);
  out.csv("report/variance_components.csv", variance);
  out.csv("report/rank_probabilities.csv", ranks_csv);
  out.csv("report/qq.csv", qq);
  if (rmsr.rows() > 0) out.csv("report/rmsr_curves.csv", rmsr);
  return out.take();
}

// ----- diagnose

std::vector<std::string> cmd_diagnose(const RunConfig& c) {
  Outputs out(c.out_dir);
  const fs::path meta_path = c.input("metadata", kMetadata);
  const Dataset d = load_metadata(meta_path);
  const ClusterModel m = cluster_model_for(c, d);
  const Json dj = c.section("diagnose");
  GridSpec grid;
  grid.points = get_field_or<int>(dj, "grid_points", "diagnose", grid.points);
  const bool spectra = get_field_or<bool>(dj, "spectra", "diagnose", true);
  WindowFeatureOptions wo;
  wo.window_s = get_field_or<double>(dj, "window_s", "diagnose", wo.window_s);
  wo.bin_width_hz = get_field_or<double>(dj, "bin_width_hz", "diagnose", wo.bin_width_hz);

  std::map<std::string, std::map<int, std::vector<double>>> features;
  const auto sp = sp_intervals(d);
  for (std::size_t k = 0; k < sp.waveform_ids.size(); ++k)
    features["sp_interval_s"][m.waveform_cluster.at(sp.waveform_ids[k])].push_back(sp.intervals_s[k]);
  for (const auto& s : d.sources()) {
    if (s.magnitude) features["magnitude"][m.source_cluster.at(s.source_id)].push_back(*s.magnitude);
    if (s.depth_km) features["depth_km"][m.source_cluster.at(s.source_id)].push_back(*s.depth_km);
  }
  if (spectra) {
    static constexpr const char* kComponents[3] = {"z", "n", "e"};
    for (const auto& w : d.waveforms()) {
      if (!w.is_earthquake() || !w.trace_ref) continue;
      fs::path p(*w.trace_ref);
      if (p.is_relative()) p = meta_path.parent_path() / p;
      if (!fs::exists(p)) throw MissingInputError("trace_ref", p);
      const auto f = window_features(load_trace(p, w.n_samples), *w.p_arrival_index, w.sampling_rate_hz, wo);
      const int cluster = m.waveform_cluster.at(w.waveform_id);
      for (std::size_t comp = 0; comp < 3; ++comp) {
        const auto& cf = f.components[comp];
        if (!cf.defined) continue;
        features[std::string("log_peak_amplitude_") + kComponents[comp]][cluster].push_back(cf.log_peak_amplitude);
        features[std::string("argmax_frequency_hz_") + kComponents[comp]][cluster].push_back(cf.argmax_frequency_hz);
      }
    }
  }

  CsvWriter density({"feature", "group", "x", "density"});
  Json curves = Json::array();
  for (const auto& [name, by_group] : features) {
    std::vector<GroupValues> groups;
    for (const auto& [g, v] : by_group)
      if (v.size() >= 2) groups.push_back({std::to_string(g), v});
    if (groups.empty()) continue;
    for (const auto& cv : feature_density(name, groups, grid)) {
      for (std::size_t k = 0; k < cv.grid.size(); ++k) density.row({name, cv.group_id, cv.grid[k], cv.density[k]});
      curves.push_back({{"feature", name}, {"group", cv.group_id}, {"n", cv.n}, {"bandwidth", cv.bandwidth},
                        {"degenerate", cv.degenerate}});
    }
  }
  out.csv("diagnostics/density.csv", density);
  out.json("diagnostics/density_summary.json", curves);
  Json sj = Json::object();
  sj["earthquake_waveforms"] = sp.earthquake_waveforms;
  sj["fraction_with_s"] = sp.fraction_with_s;
  sj["waveform_ids"] = sp.waveform_ids;
  sj["intervals_s"] = sp.intervals_s;
  out.json("diagnostics/sp_intervals.json", sj);
  return out.take();
}

using Command = std::vector<std::string> (*)(const RunConfig&);

const std::map<std::string, Command, std::less<>>& command_table() {
  static const std::map<std::string, Command, std::less<>> table{
      {"synth", cmd_synth},         {"cluster", cmd_cluster},   {"split", cmd_split},
      {"sample-sets", cmd_sample_sets}, {"aggregate", cmd_aggregate}, {"pick", cmd_pick},
      {"score", cmd_score},         {"threshold", cmd_threshold}, {"fit", cmd_fit},
      {"rank", cmd_rank},           {"diagnose", cmd_diagnose}, {"report", cmd_report}};
  return table;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"synth", "cluster", "split", "sample-sets", "aggregate", "pick",
                                              "score", "threshold", "fit", "rank", "diagnose", "report"};
  return names;
}

std::vector<std::string> run_command(std::string_view name, const RunConfig& config) {
  const auto it = command_table().find(name);
  if (it == command_table().end()) throw ValidationError("unknown subcommand '" + std::string(name) + "'");
  return it->second(config);
}

}  // namespace pbench::cli
