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

#include "pbench/serialize.hpp"

#include <cmath>
#include <istream>
#include <ostream>

namespace pbench {

namespace {

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json optional_or_null(const std::optional<double>& v) {
  return v ? finite_or_null(*v) : Json(nullptr);
}

const Json& require_object(const Json& j, std::string_view path) {
  if (!j.is_object()) throw FieldError(std::string(path), "expected an object");
  return j;
}

const Json& require_array(const Json& obj, std::string_view key, std::string_view path) {
  const Json& v = require_field(obj, key, path);
  if (!v.is_array()) throw FieldError(join_path(path, key), "expected an array");
  return v;
}

std::string_view to_string(CiQuantile q) {
  return q == CiQuantile::gaussian ? "gaussian" : "student_t";
}

Json geo_points(std::span<const GeoPoint> pts) {
  Json out = Json::array();
  for (const auto& p : pts) out.push_back(Json::array({p.latitude, p.longitude}));
  return out;
}

std::vector<GeoPoint> parse_geo_points(const Json& arr, std::string_view path) {
  std::vector<GeoPoint> pts;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const Json& p = arr[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw FieldError(std::string(path) + "[" + std::to_string(i) + "]",
                       "expected [latitude, longitude]");
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return pts;
}

Json table_values(const MetricTable& t) {
  Json values = Json::array();
  for (std::size_t k = 0; k < t.size(); ++k)
    values.push_back(t.missing_mask()[k] ? Json(nullptr) : finite_or_null(t.raw_values()[k]));
  return values;
}

void fill_table(MetricTable& t, const Json& values, std::string_view path) {
  if (!values.is_array() || values.size() != t.size())
    throw FieldError(std::string(path),
                     "expected " + std::to_string(t.size()) + " values for the design");
  for (std::size_t k = 0; k < t.size(); ++k) {
    const Json& v = values[k];
    if (v.is_null()) {
      t.set_missing(t.key_at(k));
    } else if (v.is_number()) {
      t.set(t.key_at(k), v.get<double>());
    } else {
      throw FieldError(std::string(path) + "[" + std::to_string(k) + "]",
                       "expected a number or null");
    }
  }
}

Json region(const RegionSummary& r) {
  return Json{{"source_ids", r.source_ids},
              {"earthquake_waveforms", r.earthquake_waveforms},
              {"noise_waveforms", r.noise_waveforms}};
}

RegionSummary parse_region(const Json& j, std::string_view path) {
  require_object(j, path);
  return {get_field<std::vector<std::string>>(j, "source_ids", path),
          get_field<std::size_t>(j, "earthquake_waveforms", path),
          get_field<std::size_t>(j, "noise_waveforms", path)};
}

Json mean_squares_json(const MeanSquares& ms) {
  return Json{{"grand_mean", ms.grand_mean},
              {"between", ms.between},
              {"within", ms.within},
              {"df_between", ms.df_between},
              {"df_within", ms.df_within}};
}

}  // namespace

std::string join_path(std::string_view path, std::string_view key) {
  if (path.empty()) return std::string(key);
  return std::string(path) + "." + std::string(key);
}

const Json& require_field(const Json& obj, std::string_view key, std::string_view path) {
  if (!obj.is_object()) throw FieldError(path.empty() ? "<root>" : std::string(path), "expected an object");
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) throw FieldError(join_path(path, key), "missing required field");
  return *it;
}

std::string dump_document(const Json& j) { return j.dump(2) + "\n"; }

Json serialize(const DesignSpec& d) {
  return Json{{"models", d.models},
              {"quantity_levels", d.quantity_levels},
              {"cluster_sets", d.cluster_sets},
              {"initializations", d.initializations}};
}

DesignSpec parse_design(const Json& j, std::string_view path) {
  require_object(j, path);
  DesignSpec d;
  d.models = get_field<int>(j, "models", path);
  d.quantity_levels = get_field<std::vector<int>>(j, "quantity_levels", path);
  d.cluster_sets = get_field<int>(j, "cluster_sets", path);
  d.initializations = get_field<int>(j, "initializations", path);
  return d;
}

Json serialize(const KMeansOptions& o) {
  return Json{{"k", o.k}, {"seed", o.seed}, {"max_iter", o.max_iter}, {"tol", o.tol}};
}

KMeansOptions parse_kmeans_options(const Json& j, std::uint64_t seed, std::string_view path) {
  require_object(j, path);
  KMeansOptions o;
  o.k = get_field<int>(j, "k", path);
  o.max_iter = get_field_or<int>(j, "max_iter", path, o.max_iter);
  o.tol = get_field_or<double>(j, "tol", path, o.tol);
  o.seed = seed;
  return o;
}

Json serialize(const SplitConfig& c) {
  return Json{{"n_test_north", c.n_test_north},
              {"n_test_south", c.n_test_south},
              {"noise_ratio", c.noise_ratio},
              {"validation_fraction", c.validation_fraction},
              {"training_fraction", c.training_fraction},
              {"take_all", c.take_all}};
}

SplitConfig parse_split_config(const Json& j, std::string_view path) {
  require_object(j, path);
  SplitConfig c;
  c.n_test_north = get_field_or<int>(j, "n_test_north", path, c.n_test_north);
  c.n_test_south = get_field_or<int>(j, "n_test_south", path, c.n_test_south);
  c.noise_ratio = get_field_or<double>(j, "noise_ratio", path, c.noise_ratio);
  c.validation_fraction = get_field_or<double>(j, "validation_fraction", path, c.validation_fraction);
  c.training_fraction = get_field_or<double>(j, "training_fraction", path, c.training_fraction);
  c.take_all = get_field_or<bool>(j, "take_all", path, c.take_all);
  return c;
}

Json serialize(const ClusterModel& m) {
  Json sc = Json::object();
  for (const auto& [id, c] : m.source_cluster) sc[id] = c;
  Json wc = Json::object();
  for (const auto& [id, c] : m.waveform_cluster) wc[id] = c;
  return Json{{"k", m.k},
              {"centroids", geo_points(m.centroids)},
              {"inertia", m.inertia},
              {"inertia_history", m.inertia_history},
              {"iterations", m.iterations},
              {"converged", m.converged},
              {"labels", m.labels},
              {"source_cluster", std::move(sc)},
              {"waveform_cluster", std::move(wc)}};
}

ClusterModel parse_cluster_model(const Json& j, std::string_view path) {
  require_object(j, path);
  ClusterModel m;
  m.k = get_field<int>(j, "k", path);
  m.centroids = parse_geo_points(require_array(j, "centroids", path), join_path(path, "centroids"));
  if (static_cast<int>(m.centroids.size()) != m.k)
    throw FieldError(join_path(path, "centroids"), "expected k centroids");
  m.inertia = get_field_or<double>(j, "inertia", path, 0.0);
  m.inertia_history = get_field_or<std::vector<double>>(j, "inertia_history", path, {});
  m.iterations = get_field_or<int>(j, "iterations", path, 0);
  m.converged = get_field_or<bool>(j, "converged", path, false);
  m.labels = get_field_or<std::vector<int>>(j, "labels", path, {});
  m.source_cluster = get_field_or<std::map<std::string, int>>(j, "source_cluster", path, {});
  m.waveform_cluster = get_field_or<std::map<std::string, int>>(j, "waveform_cluster", path, {});
  return m;
}

Json serialize(const SplitPlan& p) {
  Json pools = Json::array();
  for (const auto& [cluster, pool] : p.training_pools) {
    Json sources = Json::array();
    for (const auto& s : pool.sources)
      sources.push_back(Json{{"source_id", s.source_id}, {"waveform_ids", s.waveform_ids}});
    pools.push_back(Json{{"cluster_id", cluster},
                         {"sources", std::move(sources)},
                         {"noise_waveform_ids", pool.noise_waveform_ids}});
  }
  return Json{{"seed", p.seed},
              {"config", serialize(p.config)},
              {"test_clusters_north", p.test_clusters_north},
              {"test_clusters_south", p.test_clusters_south},
              {"training_clusters", p.training_clusters},
              {"test_north", region(p.test_north)},
              {"test_south", region(p.test_south)},
              {"test_members", p.test_members},
              {"validation_sources", p.validation_sources},
              {"validation_members", p.validation_members},
              {"min_training_cluster_sources", p.min_training_cluster_sources},
              {"validation_sources_per_cluster", p.validation_sources_per_cluster},
              {"default_sources_per_cluster", p.default_sources_per_cluster},
              {"training_pools", std::move(pools)}};
}

SplitPlan parse_split_plan(const Json& j, std::string_view path) {
  require_object(j, path);
  SplitPlan p;
  p.seed = get_field<std::uint64_t>(j, "seed", path);
  p.config = parse_split_config(require_field(j, "config", path), join_path(path, "config"));
  p.test_clusters_north = get_field<std::vector<int>>(j, "test_clusters_north", path);
  p.test_clusters_south = get_field<std::vector<int>>(j, "test_clusters_south", path);
  p.training_clusters = get_field<std::vector<int>>(j, "training_clusters", path);
  p.test_north = parse_region(require_field(j, "test_north", path), join_path(path, "test_north"));
  p.test_south = parse_region(require_field(j, "test_south", path), join_path(path, "test_south"));
  p.test_members = get_field<std::vector<std::string>>(j, "test_members", path);
  p.validation_sources = get_field<std::vector<std::string>>(j, "validation_sources", path);
  p.validation_members = get_field<std::vector<std::string>>(j, "validation_members", path);
  p.min_training_cluster_sources = get_field<int>(j, "min_training_cluster_sources", path);
  p.validation_sources_per_cluster = get_field<int>(j, "validation_sources_per_cluster", path);
  p.default_sources_per_cluster = get_field<int>(j, "default_sources_per_cluster", path);
  const std::string pools_path = join_path(path, "training_pools");
  const Json& pools = require_array(j, "training_pools", path);
  for (std::size_t i = 0; i < pools.size(); ++i) {
    const std::string pp = pools_path + "[" + std::to_string(i) + "]";
    const Json& pj = require_object(pools[i], pp);
    TrainingPool pool;
    const Json& sources = require_array(pj, "sources", pp);
    for (std::size_t s = 0; s < sources.size(); ++s) {
      const std::string sp = join_path(pp, "sources") + "[" + std::to_string(s) + "]";
      pool.sources.push_back({get_field<std::string>(sources[s], "source_id", sp),
                              get_field<std::vector<std::string>>(sources[s], "waveform_ids", sp)});
    }
    pool.noise_waveform_ids = get_field<std::vector<std::string>>(pj, "noise_waveform_ids", pp);
    p.training_pools.emplace(get_field<int>(pj, "cluster_id", pp), std::move(pool));
  }
  return p;
}

Json serialize(const std::vector<ClusterSet>& sets) {
  Json out = Json::array();
  for (const auto& s : sets) {
    Json draws = Json::array();
    for (const auto& d : s.draws)
      draws.push_back(Json{{"cluster_id", d.cluster_id},
                           {"source_ids", d.source_ids},
                           {"earthquake_waveform_ids", d.earthquake_waveform_ids},
                           {"noise_waveform_ids", d.noise_waveform_ids}});
    out.push_back(Json{{"quantity_index", s.quantity_index},
                       {"set_index", s.set_index},
                       {"quantity", s.quantity},
                       {"cluster_ids", s.cluster_ids},
                       {"draws", std::move(draws)}});
  }
  return out;
}

std::vector<ClusterSet> parse_cluster_sets(const Json& j, std::string_view path) {
  if (!j.is_array()) throw FieldError(std::string(path), "expected an array");
  std::vector<ClusterSet> sets;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string sp = std::string(path) + "[" + std::to_string(i) + "]";
    const Json& sj = require_object(j[i], sp);
    ClusterSet s;
    s.quantity_index = get_field<int>(sj, "quantity_index", sp);
    s.set_index = get_field<int>(sj, "set_index", sp);
    s.quantity = get_field<int>(sj, "quantity", sp);
    s.cluster_ids = get_field<std::vector<int>>(sj, "cluster_ids", sp);
    const Json& draws = require_array(sj, "draws", sp);
    for (std::size_t k = 0; k < draws.size(); ++k) {
      const std::string dp = join_path(sp, "draws") + "[" + std::to_string(k) + "]";
      s.draws.push_back({get_field<int>(draws[k], "cluster_id", dp),
                         get_field<std::vector<std::string>>(draws[k], "source_ids", dp),
                         get_field<std::vector<std::string>>(draws[k], "earthquake_waveform_ids", dp),
                         get_field<std::vector<std::string>>(draws[k], "noise_waveform_ids", dp)});
    }
    sets.push_back(std::move(s));
  }
  return sets;
}

Json serialize(const MetricTable& t) {
  return Json{{"metric_name", t.metric_name()},
              {"design", serialize(t.design())},
              {"values", table_values(t)}};
}

MetricTable parse_metric_table(const Json& j, std::string_view path) {
  require_object(j, path);
  const auto design = parse_design(require_field(j, "design", path), join_path(path, "design"));
  design.validate_shape();
  MetricTable t(get_field<std::string>(j, "metric_name", path), design);
  fill_table(t, require_field(j, "values", path), join_path(path, "values"));
  return t;
}

Json serialize(const FunctionalMetricTable& t) {
  Json values = Json::array();
  for (const auto& tab : t.tables) values.push_back(table_values(tab));
  return Json{{"metric_name", t.metric_name},
              {"design", t.tables.empty() ? Json(nullptr) : serialize(t.tables.front().design())},
              {"grid", t.grid},
              {"values", std::move(values)}};
}

FunctionalMetricTable parse_functional_table(const Json& j, std::string_view path) {
  require_object(j, path);
  FunctionalMetricTable t;
  t.metric_name = get_field<std::string>(j, "metric_name", path);
  t.grid = get_field<std::vector<double>>(j, "grid", path);
  const auto design = parse_design(require_field(j, "design", path), join_path(path, "design"));
  design.validate_shape();
  const Json& values = require_array(j, "values", path);
  if (values.size() != t.grid.size())
    throw FieldError(join_path(path, "values"), "expected one value array per grid point");
  for (std::size_t g = 0; g < values.size(); ++g) {
    MetricTable tab(t.metric_name, design);
    fill_table(tab, values[g], join_path(path, "values") + "[" + std::to_string(g) + "]");
    t.tables.push_back(std::move(tab));
  }
  return t;
}

bool is_functional_table(const Json& j) { return j.is_object() && j.contains("grid"); }

Json serialize(const FitOptions& o) {
  return Json{{"ci_level", o.ci_level}, {"quantile", to_string(o.quantile)}};
}

FitOptions parse_fit_options(const Json& j, std::string_view path) {
  require_object(j, path);
  FitOptions o;
  o.ci_level = get_field_or<double>(j, "ci_level", path, o.ci_level);
  const auto q = get_field_or<std::string>(j, "quantile", path, std::string(to_string(o.quantile)));
  if (q == "gaussian") {
    o.quantile = CiQuantile::gaussian;
  } else if (q == "student_t") {
    o.quantile = CiQuantile::student_t;
  } else {
    throw FieldError(join_path(path, "quantile"), "expected \"gaussian\" or \"student_t\"");
  }
  return o;
}

Json serialize(const Interval& i) {
  return Json{{"low", finite_or_null(i.low)}, {"high", finite_or_null(i.high)}};
}

Json serialize(const VarianceEstimate& v) {
  return Json{{"estimate", finite_or_null(v.estimate)},
              {"ci", serialize(v.ci)},
              {"df", finite_or_null(v.df)},
              {"negative", v.negative},
              {"normal_approximation", v.normal_approximation}};
}

Json serialize(const FitResult& r) {
  const int A = r.design.quantities();
  Json cells = Json::array();
  for (const auto& c : r.cells) {
    Json cj{{"model", c.model}, {"quantity", c.quantity}, {"observed", c.observed}};
    if (c.observed) {
      cj["mean"] = c.mean;
      cj["mean_ci"] = serialize(c.mean_ci);
      cj["mean_squares"] = mean_squares_json(c.variance.mean_squares);
      cj["var_train"] = serialize(c.variance.train);
      cj["var_data"] = serialize(c.variance.data);
    }
    cells.push_back(std::move(cj));
  }
  Json effects(nullptr);
  if (r.effects_defined) {
    Json inter = Json::array();
    for (int m = 0; m < r.design.models; ++m) {
      Json row = Json::array();
      for (int a = 0; a < A; ++a) row.push_back(r.interaction(m, a));
      inter.push_back(std::move(row));
    }
    effects = Json{{"grand_mean", r.grand_mean},
                   {"model", r.model_effects},
                   {"quantity", r.quantity_effects},
                   {"interaction", std::move(inter)}};
  }
  Json train = Json::array();
  for (const auto& t : r.residuals_train)
    train.push_back(Json::array({t.key.model, t.key.quantity, t.key.cluster_set, t.key.init, t.value}));
  Json data = Json::array();
  for (const auto& d : r.residuals_data)
    data.push_back(Json::array({d.model, d.quantity, d.cluster_set, d.value}));
  return Json{{"metric_name", r.metric_name},
              {"design", serialize(r.design)},
              {"options", serialize(r.options)},
              {"effects_defined", r.effects_defined},
              {"effects", std::move(effects)},
              {"cells", std::move(cells)},
              {"residuals_train", std::move(train)},
              {"residuals_data", std::move(data)}};
}

Json serialize(const RankOptions& o) {
  return Json{{"max_enumeration", o.max_enumeration},
              {"monte_carlo_draws", o.monte_carlo_draws},
              {"seed", o.seed}};
}

RankOptions parse_rank_options(const Json& j, std::uint64_t seed, std::string_view path) {
  require_object(j, path);
  RankOptions o;
  o.max_enumeration = get_field_or<std::uint64_t>(j, "max_enumeration", path, o.max_enumeration);
  o.monte_carlo_draws = get_field_or<std::uint64_t>(j, "monte_carlo_draws", path, o.monte_carlo_draws);
  o.seed = seed;
  return o;
}

Json serialize(const RankMatrix& r) {
  Json probs = Json::array();
  for (int m = 0; m < r.models; ++m) {
    Json row = Json::array();
    for (int k = 0; k < r.models; ++k) row.push_back(r.at(m, k));
    probs.push_back(std::move(row));
  }
  return Json{{"metric_name", r.metric_name},
              {"direction", to_string(r.direction)},
              {"models", r.models},
              {"cluster_sets", r.cluster_sets},
              {"exact", r.exact},
              {"outcomes_per_set", r.outcomes_per_set},
              {"standard_error", r.standard_error},
              {"probs", std::move(probs)}};
}

Json serialize(const SynthTraceParams& p) {
  return Json{{"bump_sigma_s", p.bump_sigma_s},
              {"bump_height", p.bump_height},
              {"background_level", p.background_level},
              {"pick_error_sd_s", p.pick_error_sd_s},
              {"miss_rate", p.miss_rate},
              {"false_bump_rate", p.false_bump_rate},
              {"seed", p.seed}};
}

SynthTraceParams parse_synth_trace_params(const Json& j, std::uint64_t seed, std::string_view path) {
  require_object(j, path);
  SynthTraceParams p;
  p.bump_sigma_s = get_field_or<double>(j, "bump_sigma_s", path, p.bump_sigma_s);
  p.bump_height = get_field_or<double>(j, "bump_height", path, p.bump_height);
  p.background_level = get_field_or<double>(j, "background_level", path, p.background_level);
  p.pick_error_sd_s = get_field_or<double>(j, "pick_error_sd_s", path, p.pick_error_sd_s);
  p.miss_rate = get_field_or<double>(j, "miss_rate", path, p.miss_rate);
  p.false_bump_rate = get_field_or<double>(j, "false_bump_rate", path, p.false_bump_rate);
  p.seed = seed;
  return p;
}

Json serialize(const GeoDatasetParams& p) {
  return Json{{"n_clusters", p.n_clusters},
              {"sources_per_cluster", p.sources_per_cluster},
              {"waveforms_per_source", p.waveforms_per_source},
              {"spread_deg", p.spread_deg},
              {"noise_ratio", p.noise_ratio},
              {"n_samples", p.n_samples},
              {"sampling_rate_hz", p.sampling_rate_hz},
              {"s_label_fraction", p.s_label_fraction},
              {"centers", geo_points(p.centers)},
              {"seed", p.seed}};
}

GeoDatasetParams parse_geo_params(const Json& j, std::uint64_t seed, std::string_view path) {
  require_object(j, path);
  GeoDatasetParams p;
  p.n_clusters = get_field_or<int>(j, "n_clusters", path, p.n_clusters);
  p.sources_per_cluster = get_field_or<int>(j, "sources_per_cluster", path, p.sources_per_cluster);
  p.waveforms_per_source = get_field_or<int>(j, "waveforms_per_source", path, p.waveforms_per_source);
  p.spread_deg = get_field_or<double>(j, "spread_deg", path, p.spread_deg);
  p.noise_ratio = get_field_or<double>(j, "noise_ratio", path, p.noise_ratio);
  p.n_samples = get_field_or<std::int64_t>(j, "n_samples", path, p.n_samples);
  p.sampling_rate_hz = get_field_or<double>(j, "sampling_rate_hz", path, p.sampling_rate_hz);
  p.s_label_fraction = get_field_or<double>(j, "s_label_fraction", path, p.s_label_fraction);
  if (j.contains("centers"))
    p.centers = parse_geo_points(require_array(j, "centers", path), join_path(path, "centers"));
  p.seed = seed;
  return p;
}

Json serialize(const MetricModelParams& p) {
  return Json{{"grand_mean", p.grand_mean},
              {"model_effects", p.model_effects},
              {"quantity_effects", p.quantity_effects},
              {"interactions", p.interactions},
              {"var_data", p.var_data},
              {"var_train", p.var_train}};
}

MetricModelParams parse_metric_model(const Json& j, std::string_view path) {
  require_object(j, path);
  MetricModelParams p;
  p.grand_mean = get_field<double>(j, "grand_mean", path);
  p.model_effects = get_field<std::vector<double>>(j, "model_effects", path);
  p.quantity_effects = get_field<std::vector<double>>(j, "quantity_effects", path);
  p.interactions = get_field_or<std::vector<double>>(j, "interactions", path, {});
  // A scalar applies to every cell.
  auto variance = [&](std::string_view key) {
    const Json& v = require_field(j, key, path);
    if (v.is_number()) return std::vector<double>{v.get<double>()};
    return get_field<std::vector<double>>(j, key, path);
  };
  p.var_data = variance("var_data");
  p.var_train = variance("var_train");
  return p;
}

Json serialize(const Pick& p) {
  Json j{{"sample_index", p.sample_index},
         {"probability", p.probability},
         {"classification", to_string(p.classification)}};
  if (p.residual_s) j["residual_s"] = *p.residual_s;
  return j;
}

Json serialize(const WaveformCounts& c) {
  Json picks = Json::array();
  for (const auto& p : c.picks) picks.push_back(serialize(p));
  return Json{{"waveform_id", c.waveform_id},
              {"kind", to_string(c.kind)},
              {"tp", c.tp},
              {"fp", c.fp},
              {"fn", c.fn},
              {"residuals_s", c.residuals_s},
              {"picks", std::move(picks)}};
}

Json serialize(const AggregateCounts& c) {
  return Json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn_noise", c.tn_noise}, {"n_noise", c.n_noise}};
}

Json serialize(const CumulativeRmsrCurve& c) {
  Json values = Json::array();
  for (std::size_t k = 0; k < c.grid.size(); ++k)
    values.push_back(c.masked(k) ? Json(nullptr) : Json(c.values[k]));
  return Json{{"grid", c.grid}, {"values", std::move(values)}, {"counts", c.counts}};
}

Json serialize(const ThresholdSelection& s) {
  Json objectives = Json::array();
  for (const auto& o : s.objectives) objectives.push_back(optional_or_null(o));
  return Json{{"threshold", s.threshold},
              {"objective", s.objective},
              {"grid", s.grid},
              {"objectives", std::move(objectives)}};
}

Json serialize(const ProbabilityTrace& t) {
  return Json{{"waveform_id", t.waveform_id}, {"values", t.values}, {"coverage", t.coverage}};
}

ProbabilityTrace parse_probability_trace(const Json& j, std::string_view path) {
  require_object(j, path);
  ProbabilityTrace t;
  t.waveform_id = get_field<std::string>(j, "waveform_id", path);
  t.values = get_field<std::vector<double>>(j, "values", path);
  t.coverage = get_field<std::vector<int>>(j, "coverage", path);
  if (t.values.size() != t.coverage.size())
    throw FieldError(join_path(path, "coverage"), "length differs from values");
  return t;
}

void write_probability_traces(std::ostream& out, std::span<const ProbabilityTrace> traces) {
  for (const auto& t : traces) out << serialize(t).dump() << '\n';
}

std::vector<ProbabilityTrace> parse_probability_traces(std::istream& in) {
  std::vector<ProbabilityTrace> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_probability_trace(Json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(e.what(), n);
    } catch (const FieldError& e) {
      throw FormatError(e.what(), n);
    }
  }
  return out;
}

}  // namespace pbench
