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
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "pbench/error.hpp"
#include "pbench/rng.hpp"
#include "pbench/stratify.hpp"
#include "pbench/synth.hpp"

using namespace pbench;

namespace {

std::vector<GeoPoint> blob(GeoPoint c, int n, double spread, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < n; ++i)
    pts.push_back({c.latitude + spread * standard_normal(rng),
                   c.longitude + spread * standard_normal(rng)});
  return pts;
}

GeoDataset equal_clusters(int per_cluster, std::uint64_t seed, int waveforms_per_source = 2) {
  GeoDatasetParams p;
  p.n_clusters = 20;
  p.sources_per_cluster = per_cluster;
  p.waveforms_per_source = waveforms_per_source;
  p.centers = fixtures::meridian_centers(20);
  p.seed = seed;
  return gen_geo_dataset(p);
}

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(KMeans, SingleClusterIsTheMean) {
  const auto pts = blob({10, 20}, 37, 1.0, 1);
  const auto m = kmeans_fit(pts, {.k = 1, .seed = 4});
  double lat = 0, lon = 0;
  for (const auto& p : pts) {
    lat += p.latitude;
    lon += p.longitude;
  }
  EXPECT_NEAR(m.centroids[0].latitude, lat / 37, 1e-12);
  EXPECT_NEAR(m.centroids[0].longitude, lon / 37, 1e-12);
  EXPECT_TRUE(m.converged);
}

TEST(KMeans, OneClusterPerDistinctPoint) {
  std::vector<GeoPoint> pts{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {1, 1}, {0, 0}};
  const auto m = kmeans_fit(pts, {.k = 4, .seed = 9});
  EXPECT_DOUBLE_EQ(m.inertia, 0.0);
  std::set<std::pair<double, double>> cs;
  for (const auto& c : m.centroids) cs.insert({c.latitude, c.longitude});
  EXPECT_EQ(cs.size(), 4u);
}

TEST(KMeans, Errors) {
  std::vector<GeoPoint> pts{{0, 0}, {0, 0}, {1, 1}};
  EXPECT_THROW(kmeans_fit(pts, {.k = 3}), ValidationError);
  EXPECT_THROW(kmeans_fit({}, {.k = 1}), ValidationError);
  EXPECT_THROW(kmeans_fit(pts, {.k = 1, .tol = 0.0}), ValidationError);
}

TEST(KMeans, TwoBlobsRecoveredForEverySeed) {
  auto pts = blob({0, 0}, 100, 0.1, 11);
  const auto b = blob({10, 10}, 100, 0.1, 12);
  pts.insert(pts.end(), b.begin(), b.end());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = kmeans_fit(pts, {.k = 2, .seed = seed});
    const int lo = m.centroids[0].latitude < m.centroids[1].latitude ? 0 : 1;
    EXPECT_NEAR(m.centroids[lo].latitude, 0.0, 0.05);
    EXPECT_NEAR(m.centroids[lo].longitude, 0.0, 0.05);
    EXPECT_NEAR(m.centroids[1 - lo].latitude, 10.0, 0.05);
    EXPECT_NEAR(m.centroids[1 - lo].longitude, 10.0, 0.05);
    for (int i = 0; i < 200; ++i) EXPECT_EQ(m.labels[i], i < 100 ? lo : 1 - lo);
  }
}

TEST(KMeans, InertiaNeverIncreasesAndCentroidsAreMeans) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<GeoPoint> pts(300);
    for (auto& p : pts) p = {u(rng), u(rng)};
    const auto m = kmeans_fit(pts, {.k = 7, .seed = static_cast<std::uint64_t>(trial)});
    ASSERT_FALSE(m.inertia_history.empty());
    for (std::size_t i = 1; i < m.inertia_history.size(); ++i)
      EXPECT_LE(m.inertia_history[i], m.inertia_history[i - 1] * (1 + 1e-12));
    if (!m.converged) continue;
    for (int c = 0; c < 7; ++c) {
      double lat = 0, lon = 0;
      int n = 0;
      for (std::size_t i = 0; i < pts.size(); ++i)
        if (m.labels[i] == c) {
          lat += pts[i].latitude;
          lon += pts[i].longitude;
          ++n;
        }
      ASSERT_GT(n, 0);
      EXPECT_NEAR(m.centroids[c].latitude, lat / n, 1e-6);
      EXPECT_NEAR(m.centroids[c].longitude, lon / n, 1e-6);
    }
  }
}

TEST(KMeans, DeterministicGivenSeed) {
  const auto pts = blob({3, 3}, 200, 2.0, 3);
  const auto a = kmeans_fit(pts, {.k = 5, .seed = 77});
  const auto b = kmeans_fit(pts, {.k = 5, .seed = 77});
  EXPECT_EQ(a.centroids, b.centroids);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.inertia_history, b.inertia_history);
}

TEST(AssignCluster, ExactAndTieRules) {
  std::vector<GeoPoint> c{{0, 0}, {1, 0}, {5, 5}, {2, 2}, {-1, 0}};
  EXPECT_EQ(assign_cluster(c, {2, 2}), 3);
  EXPECT_EQ(assign_cluster(c, {0, 0}), 0);
  // (0, 0) is equidistant from centroids 1 and 4 once centroid 0 moves away.
  c[0] = {50, 50};
  EXPECT_EQ(assign_cluster(c, {0, 0}), 1);
  for (std::size_t j = 0; j < c.size(); ++j) EXPECT_EQ(assign_cluster(c, c[j]), static_cast<int>(j));
}

TEST(AssignCluster, MatchesNearestCentroidScan) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<GeoPoint> c(9);
  for (auto& p : c) p = {u(rng), u(rng)};
  for (int i = 0; i < 1000; ++i) {
    const GeoPoint p{u(rng), u(rng)};
    EXPECT_EQ(assign_cluster(c, p), oracle::nearest_centroid(c, p));
  }
}

TEST(ClusterDataset, NoiseFollowsStations) {
  const auto g = equal_clusters(20, 1);
  const auto m = fixtures::model_from_centers(g.dataset, g.centers);
  for (const auto& [sid, blob_id] : g.source_blob) EXPECT_EQ(m.source_cluster.at(sid), blob_id);
  for (const auto& [wid, blob_id] : g.noise_blob) EXPECT_EQ(m.waveform_cluster.at(wid), blob_id);
  for (const auto& w : g.dataset.waveforms())
    if (w.is_earthquake())
      EXPECT_EQ(m.waveform_cluster.at(w.waveform_id), m.source_cluster.at(*w.source_id));
}

TEST(SplitPlan, EqualClustersForcedCounts) {
  for (int S : {10, 23, 50}) {
    const auto g = equal_clusters(S, 2);
    const auto m = fixtures::model_from_centers(g.dataset, g.centers);
    const auto plan = build_split_plan(g.dataset, m, {}, 99);
    EXPECT_EQ(plan.training_clusters.size(), 12u);
    EXPECT_EQ(plan.validation_sources_per_cluster, S / 5);
    EXPECT_EQ(plan.validation_sources.size(), 12u * (S / 5));
    EXPECT_EQ(plan.default_sources_per_cluster, static_cast<int>(0.8 * S + 1e-9));
    // meridian centers ascend, so the last four clusters are north
    EXPECT_EQ(plan.test_clusters_north, (std::vector<int>{16, 17, 18, 19}));
    EXPECT_EQ(plan.test_clusters_south, (std::vector<int>{0, 1, 2, 3}));
  }
}

TEST(SplitPlan, PaperShapedValidationCount) {
  // Twelve training clusters, the smallest holding 795 sources.
  GeoDatasetParams p;
  p.n_clusters = 20;
  p.sources_per_cluster = 800;
  p.waveforms_per_source = 1;
  p.centers = fixtures::meridian_centers(20);
  p.seed = 3;
  auto g = gen_geo_dataset(p);
  // Drop five sources (and their waveforms) from cluster 9.
  std::set<std::string> drop;
  for (const auto& [sid, b] : g.source_blob)
    if (b == 9 && drop.size() < 5) drop.insert(sid);
  std::vector<SourceRecord> sources;
  std::vector<WaveformRecord> waveforms;
  for (const auto& s : g.dataset.sources())
    if (!drop.contains(s.source_id)) sources.push_back(s);
  for (const auto& w : g.dataset.waveforms())
    if (!(w.source_id && drop.contains(*w.source_id))) waveforms.push_back(w);
  const Dataset d(sources, waveforms);
  const auto m = fixtures::model_from_centers(d, g.centers);
  const auto plan = build_split_plan(d, m, {}, 1);
  EXPECT_EQ(plan.min_training_cluster_sources, 795);
  EXPECT_EQ(plan.validation_sources_per_cluster, 159);
  EXPECT_EQ(plan.validation_sources.size(), 1908u);
  EXPECT_EQ(plan.default_sources_per_cluster, 636);
}

TEST(SplitPlan, DisjointBalancedAndLeakFree) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GeoDatasetParams p;
    p.sources_per_cluster = 15 + static_cast<int>(seed);
    p.waveforms_per_source = 1 + static_cast<int>(seed % 3);
    p.seed = seed;
    const auto g = gen_geo_dataset(p);
    const auto m = cluster_dataset(g.dataset, {.k = 20, .seed = seed});
    const auto plan = build_split_plan(g.dataset, m, {.take_all = true}, seed);
    EXPECT_EQ(plan.test_north.source_ids.size(), plan.test_south.source_ids.size());

    const auto test = as_set(plan.test_members);
    const auto val = as_set(plan.validation_members);
    std::set<std::string> train;
    std::set<std::string> train_sources;
    for (const auto& [c, pool] : plan.training_pools) {
      for (const auto& s : pool.sources) {
        train_sources.insert(s.source_id);
        train.insert(s.waveform_ids.begin(), s.waveform_ids.end());
      }
      train.insert(pool.noise_waveform_ids.begin(), pool.noise_waveform_ids.end());
    }
    for (const auto& w : test) {
      EXPECT_FALSE(val.contains(w));
      EXPECT_FALSE(train.contains(w));
    }
    for (const auto& w : val) EXPECT_FALSE(train.contains(w));

    // Every waveform of a chosen source travels with it.
    std::map<std::string, int> source_split;
    auto mark = [&](const std::string& sid, int split) {
      auto [it, fresh] = source_split.emplace(sid, split);
      EXPECT_TRUE(fresh || it->second == split) << sid;
    };
    for (const auto& sid : plan.test_north.source_ids) mark(sid, 0);
    for (const auto& sid : plan.test_south.source_ids) mark(sid, 0);
    for (const auto& sid : plan.validation_sources) mark(sid, 1);
    for (const auto& sid : train_sources) mark(sid, 2);
    for (const auto& [sid, split] : source_split) {
      for (std::size_t idx : g.dataset.waveforms_of_source(sid)) {
        const auto& wid = g.dataset.waveforms()[idx].waveform_id;
        const bool in = split == 0 ? test.contains(wid) : split == 1 ? val.contains(wid) : train.contains(wid);
        EXPECT_TRUE(in) << wid;
      }
    }
    EXPECT_LE(plan.test_north.noise_waveforms,
              static_cast<std::size_t>(std::llround(0.114 * plan.test_north.earthquake_waveforms)));
  }
}

TEST(SplitPlan, DeterministicAndSeedSensitive) {
  const auto g = equal_clusters(30, 4);
  const auto m = fixtures::model_from_centers(g.dataset, g.centers);
  const auto a = build_split_plan(g.dataset, m, {}, 5);
  EXPECT_EQ(a, build_split_plan(g.dataset, m, {}, 5));
  EXPECT_NE(a.validation_sources, build_split_plan(g.dataset, m, {}, 6).validation_sources);
}

TEST(SplitPlan, NoiseShortageNeedsTakeAll) {
  GeoDatasetParams p;
  p.sources_per_cluster = 10;
  p.noise_ratio = 0.0;
  p.centers = fixtures::meridian_centers(20);
  const auto g = gen_geo_dataset(p);
  const auto m = fixtures::model_from_centers(g.dataset, g.centers);
  EXPECT_THROW(build_split_plan(g.dataset, m, {}, 1), ValidationError);
  const auto plan = build_split_plan(g.dataset, m, {.take_all = true}, 1);
  EXPECT_EQ(plan.test_north.noise_waveforms, 0u);
}

TEST(SplitConfig, Validation) {
  EXPECT_THROW((SplitConfig{.validation_fraction = 0.0}.validate()), ValidationError);
  EXPECT_THROW((SplitConfig{.validation_fraction = 0.5, .training_fraction = 0.6}.validate()),
               ValidationError);
  EXPECT_THROW((SplitConfig{.noise_ratio = -0.1}.validate()), ValidationError);
}

class ClusterSets : public ::testing::Test {
 protected:
  void SetUp() override {
    g_ = equal_clusters(20, 6);
    model_ = fixtures::model_from_centers(g_.dataset, g_.centers);
    plan_ = build_split_plan(g_.dataset, model_, {}, 7);
  }
  GeoDataset g_;
  ClusterModel model_;
  SplitPlan plan_;
};

TEST_F(ClusterSets, StructureAndDeterminism) {
  const DesignSpec design;
  const auto sets = sample_cluster_sets(plan_, design, std::nullopt, 11);
  ASSERT_EQ(sets.size(), 5u * 12u);
  for (const auto& s : sets) {
    EXPECT_EQ(static_cast<int>(s.cluster_ids.size()), s.quantity);
    EXPECT_EQ(std::set<int>(s.cluster_ids.begin(), s.cluster_ids.end()).size(), s.cluster_ids.size());
    for (const auto& d : s.draws) {
      EXPECT_EQ(static_cast<int>(d.source_ids.size()), plan_.default_sources_per_cluster);
      EXPECT_EQ(d.noise_waveform_ids.size(),
                static_cast<std::size_t>(std::llround(0.114 * d.earthquake_waveform_ids.size())));
      const auto& pool = plan_.training_pools.at(d.cluster_id);
      for (const auto& sid : d.source_ids)
        EXPECT_TRUE(std::any_of(pool.sources.begin(), pool.sources.end(),
                                [&](const PoolSource& p) { return p.source_id == sid; }));
    }
    if (s.quantity == 12) EXPECT_EQ(s.cluster_ids, plan_.training_clusters);
  }
  EXPECT_EQ(sets, sample_cluster_sets(plan_, design, std::nullopt, 11));
  // With every cluster drawn, the source samples still vary between sets.
  const auto small = sample_cluster_sets(plan_, design, 5, 11);
  EXPECT_NE(small[4 * 12].draws[0].source_ids, small[4 * 12 + 1].draws[0].source_ids);
}

TEST_F(ClusterSets, Errors) {
  DesignSpec design;
  design.quantity_levels = {1, 13};
  EXPECT_THROW(sample_cluster_sets(plan_, design, std::nullopt, 1), ValidationError);
  EXPECT_THROW(sample_cluster_sets(plan_, DesignSpec{}, 17, 1), ValidationError);
}
