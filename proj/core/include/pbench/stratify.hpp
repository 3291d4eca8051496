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

#ifndef PBENCH_STRATIFY_HPP_
#define PBENCH_STRATIFY_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pbench/dataset.hpp"
#include "pbench/design.hpp"

namespace pbench {

struct KMeansOptions {
  int k = 20;
  std::uint64_t seed = 0;
  int max_iter = 300;
  double tol = 1e-6;  // centroid movement, degrees
};

// Spatial clustering in raw (latitude, longitude) degree space.
struct ClusterModel {
  int k = 0;
  std::vector<GeoPoint> centroids;
  std::vector<int> labels;              // per fitted point, input order
  double inertia = 0.0;                 // sum of squared distances at the end
  std::vector<double> inertia_history;  // after every assignment step
  int iterations = 0;
  bool converged = false;
  // Filled by cluster_dataset / assign_dataset.
  std::map<std::string, int> source_cluster;
  std::map<std::string, int> waveform_cluster;
};

double squared_distance(const GeoPoint& a, const GeoPoint& b);

// Lloyd's algorithm. Initial centroids are k distinct input points drawn
// uniformly at random; an empty cluster is reseeded at the point farthest
// from its own centroid. Stops when every centroid moves less than tol or
// after max_iter updates. Deterministic given the seed and the point set.
ClusterModel kmeans_fit(std::span<const GeoPoint> points, const KMeansOptions& options);

// Nearest centroid by squared Euclidean distance; ties go to the lowest index.
int assign_cluster(std::span<const GeoPoint> centroids, const GeoPoint& point);
inline int assign_cluster(const ClusterModel& model, const GeoPoint& point) {
  return assign_cluster(model.centroids, point);
}

// Fits k-means on source locations, then assigns earthquake waveforms through
// their source and noise waveforms through their station location.
ClusterModel cluster_dataset(const Dataset& dataset, const KMeansOptions& options);

// Rebuilds the id assignments of `model` for `dataset` from its centroids.
void assign_dataset(ClusterModel& model, const Dataset& dataset);

struct SplitConfig {
  int n_test_north = 4;
  int n_test_south = 4;
  double noise_ratio = 0.114;
  double validation_fraction = 0.2;
  double training_fraction = 0.8;
  bool take_all = false;  // take whatever is available instead of failing

  void validate() const;
  bool operator==(const SplitConfig&) const = default;
};

struct PoolSource {
  std::string source_id;
  std::vector<std::string> waveform_ids;
  bool operator==(const PoolSource&) const = default;
};

// Per-cluster remainder after validation removal; what cluster sets draw from.
struct TrainingPool {
  std::vector<PoolSource> sources;  // sorted by source id
  std::vector<std::string> noise_waveform_ids;
  bool operator==(const TrainingPool&) const = default;
};

struct RegionSummary {
  std::vector<std::string> source_ids;
  std::size_t earthquake_waveforms = 0;
  std::size_t noise_waveforms = 0;
  bool operator==(const RegionSummary&) const = default;
};

struct SplitPlan {
  SplitConfig config;
  std::uint64_t seed = 0;
  std::vector<int> test_clusters_north;
  std::vector<int> test_clusters_south;
  std::vector<int> training_clusters;
  RegionSummary test_north;
  RegionSummary test_south;
  std::vector<std::string> test_members;  // waveform ids, sorted
  std::vector<std::string> validation_sources;
  std::vector<std::string> validation_members;  // waveform ids, sorted
  int min_training_cluster_sources = 0;
  int validation_sources_per_cluster = 0;
  int default_sources_per_cluster = 0;  // floor(training_fraction * min sources)
  std::map<int, TrainingPool> training_pools;

  bool operator==(const SplitPlan&) const = default;
};

// Leakage-aware split: northernmost/southernmost clusters (by centroid
// latitude) form the balanced test set, equal validation source counts are
// drawn from every remaining cluster, and the rest become training pools.
// Waveforms always travel with their source.
SplitPlan build_split_plan(const Dataset& dataset, const ClusterModel& model,
                           const SplitConfig& config, std::uint64_t seed);

struct ClusterDraw {
  int cluster_id = 0;
  std::vector<std::string> source_ids;
  std::vector<std::string> earthquake_waveform_ids;
  std::vector<std::string> noise_waveform_ids;
  bool operator==(const ClusterDraw&) const = default;
};

// One training-data budget: `quantity` distinct training clusters and the
// sources/noise sampled inside each.
struct ClusterSet {
  int quantity_index = 0;
  int set_index = 0;
  int quantity = 0;
  std::vector<int> cluster_ids;  // ascending
  std::vector<ClusterDraw> draws;  // aligned with cluster_ids
  bool operator==(const ClusterSet&) const = default;
};

// For every quantity level and every cluster-set index, draws the clusters
// without replacement and samples sources_per_cluster sources (plus noise at
// the plan's ratio) inside each. Each (a, d) pair uses its own derived stream.
std::vector<ClusterSet> sample_cluster_sets(const SplitPlan& plan, const DesignSpec& design,
                                            std::optional<int> sources_per_cluster,
                                            std::uint64_t seed);

}  // namespace pbench

#endif  // PBENCH_STRATIFY_HPP_
