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

#include "pbench/ranksim.hpp"

#include <cmath>
#include <numeric>
#include <optional>

#include "pbench/error.hpp"
#include "pbench/parallel.hpp"
#include "pbench/rng.hpp"

namespace pbench {

std::string_view to_string(Direction d) {
  return d == Direction::higher_is_better ? "higher_is_better" : "lower_is_better";
}

Direction direction_from_string(std::string_view s) {
  if (s == "higher_is_better") return Direction::higher_is_better;
  if (s == "lower_is_better") return Direction::lower_is_better;
  throw ValidationError("unknown rank direction '" + std::string(s) + "'");
}

namespace {

// Number of models strictly better than and tied with (self included) model m.
void place(std::span<const double> drawn, std::size_t m, Direction dir, int& better, int& tied) {
  better = 0;
  tied = 0;
  for (double other : drawn) {
    if (other == drawn[m])
      ++tied;
    else if (dir == Direction::higher_is_better ? other > drawn[m] : other < drawn[m])
      ++better;
  }
}

// lcm(1..M) when it and lcm * outcomes fit comfortably in 64 bits.
std::optional<std::uint64_t> tie_unit(int models, std::uint64_t outcomes) {
  std::uint64_t l = 1;
  for (int t = 2; t <= models; ++t) {
    l = std::lcm(l, static_cast<std::uint64_t>(t));
    if (l > (std::uint64_t{1} << 40)) return std::nullopt;
  }
  if (outcomes > (std::uint64_t{1} << 62) / l) return std::nullopt;
  return l;
}

struct SetResult {
  std::vector<double> probs;
  std::uint64_t outcomes = 0;
};

SetResult enumerate_set(const ScoreMatrix& s, Direction dir, std::uint64_t total) {
  const auto M = static_cast<std::size_t>(s.models);
  const auto unit = tie_unit(s.models, total);
  std::vector<std::uint64_t> mass(M * M, 0);
  std::vector<double> fmass(M * M, 0.0);
  std::vector<int> choice(M, 0);
  std::vector<double> drawn(M);
  SetResult out;
  while (true) {
    for (std::size_t m = 0; m < M; ++m) drawn[m] = s.at(static_cast<int>(m), choice[m]);
    for (std::size_t m = 0; m < M; ++m) {
      int better = 0, tied = 0;
      place(drawn, m, dir, better, tied);
      for (int r = better; r < better + tied; ++r) {
        if (unit)
          mass[m * M + r] += *unit / static_cast<std::uint64_t>(tied);
        else
          fmass[m * M + r] += 1.0 / tied;
      }
    }
    ++out.outcomes;
    // Odometer over one init per model.
    std::size_t pos = 0;
    while (pos < M && ++choice[pos] == s.inits) choice[pos++] = 0;
    if (pos == M) break;
  }
  out.probs.resize(M * M);
  for (std::size_t e = 0; e < M * M; ++e) {
    out.probs[e] = unit ? static_cast<double>(mass[e]) /
                              (static_cast<double>(*unit) * static_cast<double>(out.outcomes))
                        : fmass[e] / static_cast<double>(out.outcomes);
  }
  return out;
}

SetResult sample_set(const ScoreMatrix& s, Direction dir, std::uint64_t draws, std::uint64_t seed) {
  const auto M = static_cast<std::size_t>(s.models);
  Rng rng(seed);
  std::uniform_int_distribution<int> init(0, s.inits - 1);
  std::vector<double> drawn(M);
  std::vector<double> mass(M * M, 0.0);
  for (std::uint64_t t = 0; t < draws; ++t) {
    for (std::size_t m = 0; m < M; ++m) drawn[m] = s.at(static_cast<int>(m), init(rng));
    for (std::size_t m = 0; m < M; ++m) {
      int better = 0, tied = 0;
      place(drawn, m, dir, better, tied);
      for (int r = better; r < better + tied; ++r) mass[m * M + r] += 1.0 / tied;
    }
  }
  SetResult out;
  out.outcomes = draws;
  out.probs.resize(M * M);
  for (std::size_t e = 0; e < M * M; ++e) out.probs[e] = mass[e] / static_cast<double>(draws);
  return out;
}

}  // namespace

RankMatrix rank_probabilities(std::span<const ScoreMatrix> per_set, Direction direction,
                              const RankOptions& options) {
  if (per_set.empty()) throw ValidationError("rank_probabilities: no cluster sets");
  const int M = per_set.front().models;
  const int I = per_set.front().inits;
  if (M < 2) throw ValidationError("rank_probabilities: need at least 2 models");
  if (I < 1) throw ValidationError("rank_probabilities: need at least 1 initialization");
  for (const auto& s : per_set) {
    if (s.models != M || s.inits != I ||
        s.values.size() != static_cast<std::size_t>(M) * static_cast<std::size_t>(I))
      throw ValidationError("rank_probabilities: inconsistent score shapes");
    for (double v : s.values)
      if (std::isnan(v)) throw ValidationError("rank_probabilities: NaN score");
  }

  // inits^models, saturating just above the cap.
  std::uint64_t total = 1;
  bool exact = true;
  for (int m = 0; m < M && exact; ++m) {
    total *= static_cast<std::uint64_t>(I);
    if (total > options.max_enumeration) exact = false;
  }
  if (!exact && options.monte_carlo_draws == 0)
    throw ValidationError("rank_probabilities: enumeration too large and no Monte Carlo draws");

  std::vector<SetResult> results(per_set.size());
  parallel_for(per_set.size(), [&](std::size_t d) {
    results[d] = exact ? enumerate_set(per_set[d], direction, total)
                       : sample_set(per_set[d], direction, options.monte_carlo_draws,
                                    derive_seed(options.seed, {static_cast<std::uint64_t>(d)}));
  });

  RankMatrix rm;
  rm.direction = direction;
  rm.models = M;
  rm.exact = exact;
  rm.cluster_sets = static_cast<int>(per_set.size());
  rm.outcomes_per_set = results.front().outcomes;
  const auto cells = static_cast<std::size_t>(M) * M;
  rm.probs.assign(cells, 0.0);
  const double D = static_cast<double>(per_set.size());
  for (const auto& r : results)
    for (std::size_t e = 0; e < cells; ++e) rm.probs[e] += r.probs[e] / D;
  if (!exact) {
    for (std::size_t e = 0; e < cells; ++e) {
      double var = 0.0;
      for (const auto& r : results)
        var += r.probs[e] * (1.0 - r.probs[e]) / static_cast<double>(options.monte_carlo_draws);
      rm.standard_error = std::max(rm.standard_error, std::sqrt(var) / D);
    }
  }
  return rm;
}

std::vector<ScoreMatrix> scores_for_quantity(const MetricTable& table, int quantity) {
  const DesignSpec& design = table.design();
  if (quantity < 0 || quantity >= design.quantities())
    throw ValidationError("scores_for_quantity: quantity index out of range");
  std::vector<ScoreMatrix> out;
  for (int d = 0; d < design.cluster_sets; ++d) {
    ScoreMatrix s;
    s.models = design.models;
    s.inits = design.initializations;
    for (int m = 0; m < design.models; ++m)
      for (int i = 0; i < design.initializations; ++i) s.values.push_back(table.at({m, quantity, d, i}));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace pbench
