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

#ifndef PBENCH_RANKSIM_HPP_
#define PBENCH_RANKSIM_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pbench/design.hpp"

namespace pbench {

enum class Direction { higher_is_better, lower_is_better };

std::string_view to_string(Direction d);
Direction direction_from_string(std::string_view s);

// Metric values of every model under every initialization for one cluster set.
struct ScoreMatrix {
  int models = 0;
  int inits = 0;
  std::vector<double> values;  // models x inits, row-major

  double at(int model, int init) const {
    return values[static_cast<std::size_t>(model) * inits + init];
  }
};

struct RankOptions {
  std::uint64_t max_enumeration = 10'000'000;  // exact while inits^models <= this
  std::uint64_t monte_carlo_draws = 1'000'000;  // per cluster set, beyond the cap
  std::uint64_t seed = 0;
};

// probs[m][r]: probability that model m lands at rank r (0 = best).
struct RankMatrix {
  std::string metric_name;
  Direction direction = Direction::higher_is_better;
  int models = 0;
  std::vector<double> probs;  // models x models, row-major
  bool exact = true;
  std::uint64_t outcomes_per_set = 0;  // enumerated (exact) or drawn (Monte Carlo)
  int cluster_sets = 0;
  double standard_error = 0.0;  // largest per-entry SE; 0 when exact

  double at(int model, int rank) const {
    return probs[static_cast<std::size_t>(model) * models + rank];
  }
};

// For each cluster set, every joint draw of one initialization per model is
// equally likely. All inits^models draws are enumerated, each is ranked, and
// exact ties split their rank mass equally among the tied models. The per-set
// matrices are averaged uniformly over cluster sets.
RankMatrix rank_probabilities(std::span<const ScoreMatrix> per_cluster_set, Direction direction,
                              const RankOptions& options = {});

// Score matrices of one quantity level, one per cluster set.
std::vector<ScoreMatrix> scores_for_quantity(const MetricTable& table, int quantity);

}  // namespace pbench

#endif  // PBENCH_RANKSIM_HPP_
