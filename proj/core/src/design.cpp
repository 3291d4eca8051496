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

#include "pbench/design.hpp"

#include <cmath>

#include "pbench/error.hpp"

namespace pbench {

std::size_t DesignSpec::instance_count() const {
  return static_cast<std::size_t>(models) * quantity_levels.size() *
         static_cast<std::size_t>(cluster_sets) * static_cast<std::size_t>(initializations);
}

void DesignSpec::validate_shape() const {
  if (models < 1) throw ValidationError("design: models must be positive");
  if (quantity_levels.empty()) throw ValidationError("design: no quantity levels");
  if (cluster_sets < 1) throw ValidationError("design: cluster_sets must be positive");
  if (initializations < 1) throw ValidationError("design: initializations must be positive");
  for (std::size_t a = 0; a < quantity_levels.size(); ++a) {
    if (quantity_levels[a] < 1)
      throw ValidationError("design: quantity levels must be positive");
    if (a > 0 && quantity_levels[a] <= quantity_levels[a - 1])
      throw ValidationError("design: quantity levels must be strictly increasing");
  }
}

void DesignSpec::validate() const {
  validate_shape();
  if (models < 2) throw ValidationError("design: need at least 2 models");
  if (cluster_sets < 2) throw ValidationError("design: need at least 2 cluster sets");
  if (initializations < 2) throw ValidationError("design: need at least 2 initializations");
}

void DesignSpec::validate(int training_clusters) const {
  validate();
  if (quantity_levels.back() > training_clusters)
    throw ValidationError("design: quantity level " + std::to_string(quantity_levels.back()) +
                          " exceeds " + std::to_string(training_clusters) +
                          " training clusters");
}

std::vector<ModelInstanceKey> enumerate_instances(const DesignSpec& design) {
  design.validate_shape();
  std::vector<ModelInstanceKey> keys;
  keys.reserve(design.instance_count());
  for (int m = 0; m < design.models; ++m)
    for (int a = 0; a < design.quantities(); ++a)
      for (int d = 0; d < design.cluster_sets; ++d)
        for (int i = 0; i < design.initializations; ++i) keys.push_back({m, a, d, i});
  return keys;
}

MetricTable::MetricTable(std::string metric_name, DesignSpec design)
    : metric_name_(std::move(metric_name)), design_(std::move(design)) {
  design_.validate_shape();
  values_.assign(design_.instance_count(), 0.0);
  missing_.assign(design_.instance_count(), true);
}

std::size_t MetricTable::flat_index(const ModelInstanceKey& k) const {
  if (k.model < 0 || k.model >= design_.models || k.quantity < 0 ||
      k.quantity >= design_.quantities() || k.cluster_set < 0 ||
      k.cluster_set >= design_.cluster_sets || k.init < 0 ||
      k.init >= design_.initializations)
    throw ValidationError("instance key outside design bounds");
  return ((static_cast<std::size_t>(k.model) * design_.quantities() + k.quantity) *
              design_.cluster_sets +
          k.cluster_set) *
             design_.initializations +
         k.init;
}

ModelInstanceKey MetricTable::key_at(std::size_t flat) const {
  if (flat >= values_.size()) throw ValidationError("flat index outside table");
  ModelInstanceKey k;
  k.init = static_cast<int>(flat % design_.initializations);
  flat /= design_.initializations;
  k.cluster_set = static_cast<int>(flat % design_.cluster_sets);
  flat /= design_.cluster_sets;
  k.quantity = static_cast<int>(flat % design_.quantities());
  k.model = static_cast<int>(flat / design_.quantities());
  return k;
}

void MetricTable::set(const ModelInstanceKey& key, double value) {
  if (!std::isfinite(value)) throw ValidationError("metric values must be finite");
  const auto i = flat_index(key);
  values_[i] = value;
  missing_[i] = false;
}

void MetricTable::set_missing(const ModelInstanceKey& key) {
  const auto i = flat_index(key);
  values_[i] = 0.0;
  missing_[i] = true;
}

std::optional<double> MetricTable::get(const ModelInstanceKey& key) const {
  const auto i = flat_index(key);
  if (missing_[i]) return std::nullopt;
  return values_[i];
}

double MetricTable::at(const ModelInstanceKey& key) const {
  const auto i = flat_index(key);
  if (missing_[i]) throw ValidationError("metric value missing");
  return values_[i];
}

bool MetricTable::cell_complete(int model, int quantity) const {
  for (int d = 0; d < design_.cluster_sets; ++d)
    for (int i = 0; i < design_.initializations; ++i)
      if (missing_[flat_index({model, quantity, d, i})]) return false;
  return true;
}

bool MetricTable::complete() const {
  for (bool m : missing_)
    if (m) return false;
  return true;
}

std::vector<double> MetricTable::cell_values(int model, int quantity) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(design_.cluster_sets) * design_.initializations);
  for (int d = 0; d < design_.cluster_sets; ++d) {
    for (int i = 0; i < design_.initializations; ++i) {
      const auto idx = flat_index({model, quantity, d, i});
      if (missing_[idx])
        throw ValidationError(metric_name_ + ": cell (model " + std::to_string(model) +
                              ", quantity " + std::to_string(quantity) +
                              ") is not fully observed");
      out.push_back(values_[idx]);
    }
  }
  return out;
}

}  // namespace pbench
