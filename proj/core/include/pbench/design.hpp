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

#ifndef PBENCH_DESIGN_HPP_
#define PBENCH_DESIGN_HPP_

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace pbench {

// Experimental design: models x quantity levels x cluster sets x initializations.
struct DesignSpec {
  int models = 3;
  std::vector<int> quantity_levels{1, 3, 6, 9, 12};  // clusters per training set
  int cluster_sets = 12;
  int initializations = 4;

  int quantities() const { return static_cast<int>(quantity_levels.size()); }
  std::size_t instance_count() const;

  // All dimensions positive and quantity levels strictly increasing.
  void validate_shape() const;
  // validate_shape() plus models, cluster_sets, initializations >= 2, which
  // the variance separation needs.
  void validate() const;
  // validate() plus every quantity level <= available training clusters.
  void validate(int training_clusters) const;

  bool operator==(const DesignSpec&) const = default;
};

struct ModelInstanceKey {
  int model = 0;
  int quantity = 0;
  int cluster_set = 0;
  int init = 0;
  auto operator<=>(const ModelInstanceKey&) const = default;
};

// Every key of the design lattice in lexicographic (model, quantity,
// cluster_set, init) order. Only validate_shape() is required.
std::vector<ModelInstanceKey> enumerate_instances(const DesignSpec& design);

// Dense model x quantity x cluster-set x init table of one scalar metric.
// Missing entries are explicit in the mask; they never hold sentinel values.
class MetricTable {
 public:
  MetricTable(std::string metric_name, DesignSpec design);

  const std::string& metric_name() const { return metric_name_; }
  const DesignSpec& design() const { return design_; }
  std::size_t size() const { return values_.size(); }

  std::size_t flat_index(const ModelInstanceKey& key) const;
  ModelInstanceKey key_at(std::size_t flat) const;

  void set(const ModelInstanceKey& key, double value);
  void set_missing(const ModelInstanceKey& key);
  bool observed(const ModelInstanceKey& key) const { return !missing_[flat_index(key)]; }
  std::optional<double> get(const ModelInstanceKey& key) const;
  // Throws if missing.
  double at(const ModelInstanceKey& key) const;

  bool cell_complete(int model, int quantity) const;
  bool complete() const;
  // cluster_sets x initializations values of one (model, quantity) cell,
  // row-major by cluster set. Throws ValidationError if any value is missing.
  std::vector<double> cell_values(int model, int quantity) const;

  const std::vector<double>& raw_values() const { return values_; }
  const std::vector<bool>& missing_mask() const { return missing_; }

  bool operator==(const MetricTable&) const = default;

 private:
  std::string metric_name_;
  DesignSpec design_;
  std::vector<double> values_;
  std::vector<bool> missing_;
};

// A metric defined along a grid (e.g. cumulative RMSR vs cutoff): one table
// per grid point sharing a design.
struct FunctionalMetricTable {
  std::string metric_name;
  std::vector<double> grid;
  std::vector<MetricTable> tables;
};

}  // namespace pbench

#endif  // PBENCH_DESIGN_HPP_
