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

#include "pbench/stratify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pbench/error.hpp"
#include "pbench/rng.hpp"

namespace pbench {

double squared_distance(const GeoPoint& a, const GeoPoint& b) {
  const double dlat = a.latitude - b.latitude;
  const double dlon = a.longitude - b.longitude;
  return dlat * dlat + dlon * dlon;
}

int assign_cluster(std::span<const GeoPoint> centroids, const GeoPoint& point) {
  if (centroids.empty()) throw ValidationError("assign_cluster: model has no centroids");
  int best = 0;
  double best_d = squared_distance(centroids[0], point);
  for (std::size_t j = 1; j < centroids.size(); ++j) {
    const double d = squared_distance(centroids[j], point);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

namespace {

double total_inertia(std::span<const GeoPoint> points, std::span<const GeoPoint> centroids,
                     std::span<const int> labels) {
  double sum = 0.0;
  for (std::size_t p = 0; p < points.size(); ++p)
    sum += squared_distance(points[p], centroids[labels[p]]);
  return sum;
}

void assign_all(std::span<const GeoPoint> points, std::span<const GeoPoint> centroids,
                std::vector<int>& labels) {
  for (std::size_t p = 0; p < points.size(); ++p)
    labels[p] = assign_cluster(centroids, points[p]);
}

// Means of assigned points; returns per-cluster counts. Empty clusters keep
// their previous centroid.
std::vector<std::size_t> recompute_means(std::span<const GeoPoint> points,
                                         std::span<const int> labels,
                                         std::vector<GeoPoint>& centroids) {
  const std::size_t k = centroids.size();
  std::vector<double> lat(k, 0.0), lon(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t p = 0; p < points.size(); ++p) {
    lat[labels[p]] += points[p].latitude;
    lon[labels[p]] += points[p].longitude;
    ++count[labels[p]];
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (count[j] == 0) continue;
    centroids[j] = {lat[j] / static_cast<double>(count[j]),
                    lon[j] / static_cast<double>(count[j])};
  }
  return count;
}

}  // namespace

ClusterModel kmeans_fit(std::span<const GeoPoint> points, const KMeansOptions& options) {
  if (points.empty()) throw ValidationError("kmeans_fit: empty input");
  if (options.k < 1) throw ValidationError("kmeans_fit: k must be positive");
  if (!(options.tol > 0.0)) throw ValidationError("kmeans_fit: tol must be positive");
  if (options.max_iter < 1) throw ValidationError("kmeans_fit: max_iter must be positive");

  auto lex = [](const GeoPoint& a, const GeoPoint& b) {
    return a.latitude != b.latitude ? a.latitude < b.latitude : a.longitude < b.longitude;
  };
  std::vector<GeoPoint> distinct(points.begin(), points.end());
  std::sort(distinct.begin(), distinct.end(), lex);
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const auto k = static_cast<std::size_t>(options.k);
  if (k > distinct.size())
    throw ValidationError("kmeans_fit: k=" + std::to_string(k) + " exceeds " +
                          std::to_string(distinct.size()) + " distinct points");

  Rng rng(options.seed);
  ClusterModel model;
  model.k = options.k;
  for (std::size_t idx : sample_indices(distinct.size(), k, rng))
    model.centroids.push_back(distinct[idx]);

  std::vector<int>& labels = model.labels;
  labels.assign(points.size(), 0);
  for (int iter = 0; iter < options.max_iter; ++iter) {
    assign_all(points, model.centroids, labels);
    model.inertia_history.push_back(total_inertia(points, model.centroids, labels));

    std::vector<GeoPoint> next = model.centroids;
    auto count = recompute_means(points, labels, next);
    for (std::size_t j = 0; j < k; ++j) {
      if (count[j] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t p = 0; p < points.size(); ++p) {
        const double d = squared_distance(points[p], next[labels[p]]);
        if (d > far_d) {
          far_d = d;
          far = p;
        }
      }
      labels[far] = static_cast<int>(j);
      count = recompute_means(points, labels, next);
      next[j] = points[far];
    }

    double movement = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      movement = std::max(movement, std::sqrt(squared_distance(next[j], model.centroids[j])));
    model.centroids = std::move(next);
    model.iterations = iter + 1;
    if (movement < options.tol) {
      model.converged = true;
      break;
    }
  }
  assign_all(points, model.centroids, labels);
  model.inertia = total_inertia(points, model.centroids, labels);
  model.inertia_history.push_back(model.inertia);
  return model;
}

void assign_dataset(ClusterModel& model, const Dataset& dataset) {
  model.source_cluster.clear();
  model.waveform_cluster.clear();
  for (const auto& s : dataset.sources())
    model.source_cluster[s.source_id] = assign_cluster(model, s.location());
  for (const auto& w : dataset.waveforms()) {
    model.waveform_cluster[w.waveform_id] =
        w.is_earthquake() ? model.source_cluster.at(*w.source_id)
                          : assign_cluster(model, w.station());
  }
}

ClusterModel cluster_dataset(const Dataset& dataset, const KMeansOptions& options) {
  std::vector<GeoPoint> points;
  points.reserve(dataset.sources().size());
  for (const auto& s : dataset.sources()) points.push_back(s.location());
  ClusterModel model = kmeans_fit(points, options);
  for (std::size_t p = 0; p < points.size(); ++p)
    model.source_cluster[dataset.sources()[p].source_id] = model.labels[p];
  for (const auto& w : dataset.waveforms()) {
    model.waveform_cluster[w.waveform_id] =
        w.is_earthquake() ? model.source_cluster.at(*w.source_id)
                          : assign_cluster(model, w.station());
  }
  return model;
}

void SplitConfig::validate() const {
  if (n_test_north < 1 || n_test_south < 1)
    throw ValidationError("split: n_test_north and n_test_south must be positive");
  if (!(noise_ratio >= 0.0 && std::isfinite(noise_ratio)))
    throw ValidationError("split: noise_ratio must be nonnegative");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw ValidationError("split: validation_fraction must lie in (0, 1)");
  if (!(training_fraction > 0.0 && training_fraction <= 1.0))
    throw ValidationError("split: training_fraction must lie in (0, 1]");
  if (validation_fraction + training_fraction > 1.0 + 1e-12)
    throw ValidationError("split: validation_fraction + training_fraction exceeds 1");
}

namespace {

// floor(fraction * count) without losing whole units to representation error
// (0.29 * 100 evaluates to 28.999999999999996).
int fraction_of(double fraction, std::size_t count) {
  return static_cast<int>(std::floor(fraction * static_cast<double>(count) + 1e-9));
}

std::size_t noise_target(double ratio, std::size_t earthquake_waveforms) {
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(earthquake_waveforms)));
}

template <typename T>
std::vector<T> draw(const std::vector<T>& pool, std::size_t k, std::uint64_t stream_seed) {
  Rng rng(stream_seed);
  std::vector<T> out;
  out.reserve(k);
  for (std::size_t idx : sample_indices(pool.size(), k, rng)) out.push_back(pool[idx]);
  std::sort(out.begin(), out.end());
  return out;
}

struct ClusterInventory {
  std::map<int, std::vector<std::string>> sources;  // sorted ids
  std::map<int, std::vector<std::string>> noise;    // sorted ids
};

ClusterInventory inventory(const Dataset& dataset, const ClusterModel& model) {
  ClusterInventory inv;
  for (int c = 0; c < model.k; ++c) {
    inv.sources[c];
    inv.noise[c];
  }
  for (const auto& s : dataset.sources()) {
    auto it = model.source_cluster.find(s.source_id);
    if (it == model.source_cluster.end())
      throw ValidationError("split: source '" + s.source_id + "' has no cluster assignment");
    inv.sources[it->second].push_back(s.source_id);
  }
  for (const auto& w : dataset.waveforms()) {
    if (w.is_earthquake()) continue;
    auto it = model.waveform_cluster.find(w.waveform_id);
    if (it == model.waveform_cluster.end())
      throw ValidationError("split: noise waveform '" + w.waveform_id +
                            "' has no cluster assignment");
    inv.noise[it->second].push_back(w.waveform_id);
  }
  for (auto& [c, ids] : inv.sources) std::sort(ids.begin(), ids.end());
  for (auto& [c, ids] : inv.noise) std::sort(ids.begin(), ids.end());
  return inv;
}

std::vector<std::string> waveforms_of(const Dataset& dataset, const std::string& source_id) {
  std::vector<std::string> ids;
  for (std::size_t idx : dataset.waveforms_of_source(source_id))
    ids.push_back(dataset.waveforms()[idx].waveform_id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<std::string> draw_noise(const std::vector<std::string>& available,
                                    std::size_t wanted, bool take_all,
                                    std::uint64_t stream_seed, const std::string& where) {
  if (wanted > available.size()) {
    if (!take_all)
      throw ValidationError("split: " + where + " needs " + std::to_string(wanted) +
                            " noise waveforms but only " + std::to_string(available.size()) +
                            " are available (set take_all to accept fewer)");
    wanted = available.size();
  }
  return draw(available, wanted, stream_seed);
}

}  // namespace

SplitPlan build_split_plan(const Dataset& dataset, const ClusterModel& model,
                           const SplitConfig& config, std::uint64_t seed) {
  config.validate();
  if (static_cast<int>(model.centroids.size()) != model.k)
    throw ValidationError("split: cluster model is inconsistent");
  if (config.n_test_north + config.n_test_south >= model.k)
    throw ValidationError("split: test clusters leave no training clusters");

  SplitPlan plan;
  plan.config = config;
  plan.seed = seed;

  std::vector<int> order(static_cast<std::size_t>(model.k));
  for (int c = 0; c < model.k; ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return model.centroids[a].latitude > model.centroids[b].latitude;
  });
  plan.test_clusters_north.assign(order.begin(), order.begin() + config.n_test_north);
  plan.test_clusters_south.assign(order.end() - config.n_test_south, order.end());
  plan.training_clusters.assign(order.begin() + config.n_test_north,
                                order.end() - config.n_test_south);
  std::sort(plan.test_clusters_north.begin(), plan.test_clusters_north.end());
  std::sort(plan.test_clusters_south.begin(), plan.test_clusters_south.end());
  std::sort(plan.training_clusters.begin(), plan.training_clusters.end());

  const ClusterInventory inv = inventory(dataset, model);

  // Test set: equal source counts from both regions.
  auto region_sources = [&](const std::vector<int>& clusters) {
    std::vector<std::string> ids;
    for (int c : clusters) ids.insert(ids.end(), inv.sources.at(c).begin(), inv.sources.at(c).end());
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  auto region_noise = [&](const std::vector<int>& clusters) {
    std::vector<std::string> ids;
    for (int c : clusters) ids.insert(ids.end(), inv.noise.at(c).begin(), inv.noise.at(c).end());
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  const auto north_all = region_sources(plan.test_clusters_north);
  const auto south_all = region_sources(plan.test_clusters_south);
  const std::size_t region_count = std::min(north_all.size(), south_all.size());
  if (region_count == 0) throw ValidationError("split: a test region has no sources");

  std::vector<std::string> test_members;
  auto fill_region = [&](RegionSummary& region, const std::vector<std::string>& all,
                         const std::vector<int>& clusters, const char* tag) {
    region.source_ids = draw(all, region_count, derive_seed(seed, std::string("test-sources-") + tag));
    for (const auto& sid : region.source_ids) {
      auto ids = waveforms_of(dataset, sid);
      region.earthquake_waveforms += ids.size();
      test_members.insert(test_members.end(), ids.begin(), ids.end());
    }
    auto noise = draw_noise(region_noise(clusters),
                            noise_target(config.noise_ratio, region.earthquake_waveforms),
                            config.take_all, derive_seed(seed, std::string("test-noise-") + tag),
                            std::string("test region ") + tag);
    region.noise_waveforms = noise.size();
    test_members.insert(test_members.end(), noise.begin(), noise.end());
  };
  fill_region(plan.test_north, north_all, plan.test_clusters_north, "north");
  fill_region(plan.test_south, south_all, plan.test_clusters_south, "south");
  std::sort(test_members.begin(), test_members.end());
  plan.test_members = std::move(test_members);

  // Validation: the same number of sources from every training cluster.
  std::size_t min_sources = std::numeric_limits<std::size_t>::max();
  for (int c : plan.training_clusters) min_sources = std::min(min_sources, inv.sources.at(c).size());
  plan.min_training_cluster_sources = static_cast<int>(min_sources);
  plan.validation_sources_per_cluster = fraction_of(config.validation_fraction, min_sources);
  plan.default_sources_per_cluster = fraction_of(config.training_fraction, min_sources);

  for (int c : plan.training_clusters) {
    const auto& sources = inv.sources.at(c);
    const auto val_sources =
        draw(sources, static_cast<std::size_t>(plan.validation_sources_per_cluster),
             derive_seed(seed, {std::uint64_t{0x7661}, static_cast<std::uint64_t>(c)}));
    std::set<std::string> taken(val_sources.begin(), val_sources.end());
    std::size_t val_eq = 0;
    for (const auto& sid : val_sources) {
      plan.validation_sources.push_back(sid);
      auto ids = waveforms_of(dataset, sid);
      val_eq += ids.size();
      plan.validation_members.insert(plan.validation_members.end(), ids.begin(), ids.end());
    }
    const auto val_noise =
        draw_noise(inv.noise.at(c), noise_target(config.noise_ratio, val_eq), config.take_all,
                   derive_seed(seed, {std::uint64_t{0x766e}, static_cast<std::uint64_t>(c)}),
                   "validation cluster " + std::to_string(c));
    plan.validation_members.insert(plan.validation_members.end(), val_noise.begin(),
                                   val_noise.end());

    TrainingPool& pool = plan.training_pools[c];
    for (const auto& sid : sources)
      if (!taken.contains(sid)) pool.sources.push_back({sid, waveforms_of(dataset, sid)});
    const std::set<std::string> noise_taken(val_noise.begin(), val_noise.end());
    for (const auto& wid : inv.noise.at(c))
      if (!noise_taken.contains(wid)) pool.noise_waveform_ids.push_back(wid);
    if (static_cast<int>(pool.sources.size()) < plan.default_sources_per_cluster && !config.take_all)
      throw ValidationError("split: training cluster " + std::to_string(c) + " is exhausted");
  }
  std::sort(plan.validation_sources.begin(), plan.validation_sources.end());
  std::sort(plan.validation_members.begin(), plan.validation_members.end());
  return plan;
}

std::vector<ClusterSet> sample_cluster_sets(const SplitPlan& plan, const DesignSpec& design,
                                            std::optional<int> sources_per_cluster,
                                            std::uint64_t seed) {
  design.validate_shape();
  const int per_cluster = sources_per_cluster.value_or(plan.default_sources_per_cluster);
  if (per_cluster < 1) throw ValidationError("sample_cluster_sets: sources_per_cluster must be positive");
  const auto n_train = static_cast<int>(plan.training_clusters.size());
  for (int q : design.quantity_levels)
    if (q > n_train)
      throw ValidationError("sample_cluster_sets: quantity " + std::to_string(q) + " exceeds " +
                            std::to_string(n_train) + " training clusters");
  for (const auto& [c, pool] : plan.training_pools)
    if (static_cast<int>(pool.sources.size()) < per_cluster)
      throw ValidationError("sample_cluster_sets: training cluster " + std::to_string(c) +
                            " has " + std::to_string(pool.sources.size()) + " sources, needs " +
                            std::to_string(per_cluster));

  std::vector<ClusterSet> sets;
  sets.reserve(static_cast<std::size_t>(design.quantities() * design.cluster_sets));
  for (int a = 0; a < design.quantities(); ++a) {
    for (int d = 0; d < design.cluster_sets; ++d) {
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(d)}));
      ClusterSet set;
      set.quantity_index = a;
      set.set_index = d;
      set.quantity = design.quantity_levels[a];
      for (std::size_t idx : sample_indices(plan.training_clusters.size(),
                                            static_cast<std::size_t>(set.quantity), rng))
        set.cluster_ids.push_back(plan.training_clusters[idx]);
      std::sort(set.cluster_ids.begin(), set.cluster_ids.end());
      for (int c : set.cluster_ids) {
        const TrainingPool& pool = plan.training_pools.at(c);
        ClusterDraw cd;
        cd.cluster_id = c;
        auto picked = sample_indices(pool.sources.size(), static_cast<std::size_t>(per_cluster), rng);
        std::sort(picked.begin(), picked.end());
        for (std::size_t idx : picked) {
          cd.source_ids.push_back(pool.sources[idx].source_id);
          cd.earthquake_waveform_ids.insert(cd.earthquake_waveform_ids.end(),
                                            pool.sources[idx].waveform_ids.begin(),
                                            pool.sources[idx].waveform_ids.end());
        }
        std::sort(cd.earthquake_waveform_ids.begin(), cd.earthquake_waveform_ids.end());
        std::size_t wanted = noise_target(plan.config.noise_ratio, cd.earthquake_waveform_ids.size());
        if (wanted > pool.noise_waveform_ids.size()) {
          if (!plan.config.take_all)
            throw ValidationError("sample_cluster_sets: training cluster " + std::to_string(c) +
                                  " has too few noise waveforms");
          wanted = pool.noise_waveform_ids.size();
        }
        for (std::size_t idx : sample_indices(pool.noise_waveform_ids.size(), wanted, rng))
          cd.noise_waveform_ids.push_back(pool.noise_waveform_ids[idx]);
        std::sort(cd.noise_waveform_ids.begin(), cd.noise_waveform_ids.end());
        set.draws.push_back(std::move(cd));
      }
      sets.push_back(std::move(set));
    }
  }
  return sets;
}

}  // namespace pbench
