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

#ifndef PBENCH_TESTS_FIXTURES_HPP_
#define PBENCH_TESTS_FIXTURES_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "pbench/dataset.hpp"
#include "pbench/stratify.hpp"

namespace fixtures {

// A model whose centroids are given rather than fitted.
inline pbench::ClusterModel model_from_centers(const pbench::Dataset& dataset,
                                               std::vector<pbench::GeoPoint> centers) {
  pbench::ClusterModel m;
  m.k = static_cast<int>(centers.size());
  m.centroids = std::move(centers);
  m.converged = true;
  pbench::assign_dataset(m, dataset);
  return m;
}

// Centers along a meridian, far enough apart that blobs never mix.
inline std::vector<pbench::GeoPoint> meridian_centers(int n, double step = 2.0) {
  std::vector<pbench::GeoPoint> c;
  for (int i = 0; i < n; ++i) c.push_back({-40.0 + step * i, 10.0 + (i % 2) * 0.5});
  return c;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("pbench_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixtures

#endif  // PBENCH_TESTS_FIXTURES_HPP_
