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

// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any
// criterion fails. Optional arguments name the picker-bench executable and a
// run configuration for the end-to-end rerun check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "pbench/design.hpp"
#include "pbench/metrics.hpp"
#include "pbench/picker_eval.hpp"
#include "pbench/ranksim.hpp"
#include "pbench/rng.hpp"
#include "pbench/serialize.hpp"
#include "pbench/statframe.hpp"
#include "pbench/stratify.hpp"
#include "pbench/synth.hpp"

using namespace pbench;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  failures += pass ? 0 : 1;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void design_enumeration() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto keys = enumerate_instances(DesignSpec{});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  ScoreMatrix s{3, 4, {}};
  for (int k = 0; k < 12; ++k) s.values.push_back(u(rng));
  const auto r = rank_probabilities(std::span(&s, 1), Direction::higher_is_better);
  const double t = seconds_since(t0);
  report("design_enumeration", keys.size() == 720 && r.exact && r.outcomes_per_set == 64 && t < 1.0,
         std::to_string(keys.size()) + " instances, " + std::to_string(r.outcomes_per_set) +
             " outcomes per cluster set, " + num(t) + " s");
}

void estimator_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const DesignSpec d{};
  MetricModelParams p;
  p.grand_mean = 0.8;
  p.model_effects = {0.02, -0.02, 0.0};
  p.quantity_effects = {-0.05, -0.025, 0.0, 0.025, 0.05};
  p.var_data = {4e-4};
  p.var_train = {1e-4};
  const int reps = 1000;
  const int M = d.models, A = d.quantities();
  double grand = 0.0;
  std::vector<double> mu(M, 0.0), alpha(A, 0.0), theta(static_cast<std::size_t>(M) * A, 0.0);
  double var_data = 0.0, var_train = 0.0;
  long mean_cover = 0, train_cover = 0, cells = 0;
  for (int r = 0; r < reps; ++r) {
    const auto f = fit(gen_metrics("recall", d, p, 1000 + r));
    grand += f.grand_mean / reps;
    for (int m = 0; m < M; ++m) mu[m] += f.model_effects[m] / reps;
    for (int a = 0; a < A; ++a) alpha[a] += f.quantity_effects[a] / reps;
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] += f.interactions[k] / reps;
    for (const auto& c : f.cells) {
      var_data += c.variance.data.estimate;
      var_train += c.variance.train.estimate;
      mean_cover += c.mean_ci.contains(p.cell_mean(c.model, c.quantity));
      train_cover += c.variance.train.ci.contains(1e-4);
      ++cells;
    }
  }
  var_data /= cells;
  var_train /= cells;
  const double t = seconds_since(t0);

  // Zero true effects have no relative error; they get 1% of the largest
  // main effect as an absolute bound.
  const double zero_bound = 0.01 * 0.05;
  double worst = 0.0;
  bool effects_ok = std::abs(grand - 0.8) <= 0.01 * 0.8;
  auto check = [&](double est, double truth) {
    const double err = std::abs(est - truth);
    const bool ok = truth == 0.0 ? err <= zero_bound : err <= 0.01 * std::abs(truth);
    worst = std::max(worst, truth == 0.0 ? err / zero_bound * 0.01 : err / std::abs(truth));
    effects_ok = effects_ok && ok;
  };
  for (int m = 0; m < M; ++m) check(mu[m], p.model_effects[m]);
  for (int a = 0; a < A; ++a) check(alpha[a], p.quantity_effects[a]);
  for (double th : theta) check(th, 0.0);
  const double rel_d = std::abs(var_data - 4e-4) / 4e-4;
  const double rel_t = std::abs(var_train - 1e-4) / 1e-4;
  const double cov_m = static_cast<double>(mean_cover) / cells;
  const double cov_t = static_cast<double>(train_cover) / cells;
  report("estimator_recovery_effects", effects_ok,
         "worst relative effect error " + num(worst) + " (bound 0.01)");
  report("estimator_recovery_variances", rel_d <= 0.1 && rel_t <= 0.1,
         "sigma2_data mean " + num(var_data) + " (rel " + num(rel_d) + "), sigma2_train mean " +
             num(var_train) + " (rel " + num(rel_t) + ")");
  report("estimator_recovery_coverage", cov_m >= 0.88 && cov_m <= 0.92 && cov_t >= 0.88 && cov_t <= 0.92,
         "cell mean CI " + num(cov_m) + ", sigma2_train CI " + num(cov_t) + " over " +
             std::to_string(cells) + " cells");
  report("estimator_recovery_runtime", t < 60.0, num(t) + " s for " + std::to_string(reps) + " replicates");
}

void negative_variance() {
  const std::vector<double> v{1.0, -1.0, 1.0, -1.0};
  const auto vc = variance_components(v, 2, 2);
  const bool pass = vc.data.estimate == -0.5 && vc.data.negative && vc.train.estimate == 2.0;
  report("negative_variance", pass,
         "sigma2_data " + num(vc.data.estimate) + " (expected -0.5), negative flag " +
             (vc.data.negative ? "set" : "unset") + ", sigma2_train " + num(vc.train.estimate) +
             ", MS_between " + num(vc.mean_squares.between) + ", MS_within " +
             num(vc.mean_squares.within));
}

void rank_probabilities_check() {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> q(0, 5);
  double worst_mc = 0.0, worst_stochastic = 0.0;
  bool invariant = true;
  for (int table = 0; table < 50; ++table) {
    const bool ties = table % 2 == 1;
    std::vector<ScoreMatrix> sets;
    for (int d = 0; d < 3; ++d) {
      ScoreMatrix s{3, 4, {}};
      for (int k = 0; k < 12; ++k) s.values.push_back(ties ? q(rng) / 5.0 : u(rng));
      sets.push_back(std::move(s));
    }
    const auto dir = table % 3 == 0 ? Direction::lower_is_better : Direction::higher_is_better;
    const auto r = rank_probabilities(sets, dir);
    const auto mc = oracle::monte_carlo_ranks(sets, dir, 1'000'000, 100 + table);
    for (std::size_t e = 0; e < mc.size(); ++e) worst_mc = std::max(worst_mc, std::abs(r.probs[e] - mc[e]));
    for (int m = 0; m < r.models; ++m) {
      double row = 0, col = 0;
      for (int k = 0; k < r.models; ++k) {
        row += r.at(m, k);
        col += r.at(k, m);
      }
      worst_stochastic = std::max({worst_stochastic, std::abs(row - 1), std::abs(col - 1)});
    }
    auto moved = sets;
    for (auto& s : moved)
      for (auto& v : s.values) v = std::exp(5.0 * v) + 3.0 * v - 2.0;
    invariant = invariant && rank_probabilities(moved, dir).probs == r.probs;
  }
  report("rank_monte_carlo", worst_mc <= 0.005, "largest |exact - MC| " + num(worst_mc) + " over 50 tables");
  report("rank_doubly_stochastic", worst_stochastic <= 1e-12,
         "largest row/column deviation " + num(worst_stochastic));
  report("rank_monotone_invariance", invariant, invariant ? "identical matrices" : "matrices differ");
}

void pick_pipeline() {
  SynthTraceParams p;
  p.false_bump_rate = 1.5;
  p.pick_error_sd_s = 0.2;
  p.miss_rate = 0.3;
  p.background_level = 0.2;
  p.seed = 5;
  std::mt19937_64 rng(6);
  // Windows cover [0, 5801) of a 6000-sample waveform.
  std::uniform_int_distribution<std::int64_t> idx(100, 5700);
  long mismatches = 0, total_picks = 0;
  for (int k = 0; k < 1000; ++k) {
    WaveformRecord w;
    w.waveform_id = "t" + std::to_string(k);
    w.source_id = "s";
    w.p_arrival_index = idx(rng);
    w.n_samples = 6000;
    auto windows = gen_window_outputs(gen_trace(w, p));
    const auto trace = aggregate_windows(windows, w.n_samples);
    const double thr = 0.05 + 0.9 * (k % 19) / 18.0;
    const auto picks = extract_picks(trace, thr);
    const auto want = oracle::run_scan_picks(trace, thr);
    bool same = picks.size() == want.size();
    for (std::size_t i = 0; same && i < picks.size(); ++i) same = picks[i].sample_index == want[i];
    const auto c = classify_picks(picks, *w.p_arrival_index, w.sampling_rate_hz);
    const auto o = oracle::window_match(want, *w.p_arrival_index, w.sampling_rate_hz, 0.3);
    same = same && c.tp == (o.tp_index ? 1 : 0) && c.fp == o.fp && c.fn == o.fn;
    if (same && o.tp_index) same = c.residuals_s.at(0) == *o.residual_s;
    mismatches += same ? 0 : 1;
    total_picks += static_cast<long>(picks.size());
  }
  report("pick_oracle_equivalence", mismatches == 0 && total_picks > 0,
         std::to_string(mismatches) + " mismatches over 1000 traces (" + std::to_string(total_picks) +
             " picks)");

  SynthTraceParams e;
  e.miss_rate = 0.2;
  e.seed = 21;
  AggregateCounts total;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    WaveformRecord w;
    w.waveform_id = "r" + std::to_string(k);
    w.source_id = "s";
    w.p_arrival_index = idx(rng);
    w.n_samples = 6000;
    total += score_waveform(aggregate_windows(gen_window_outputs(gen_trace(w, e)), 6000), w, 0.5);
  }
  const double rec = recall(total);
  const double se = std::sqrt(0.2 * 0.8 / n);
  report("pick_end_to_end_recall", std::abs(rec - 0.8) <= 3 * se,
         "recall " + num(rec) + " vs 0.8, 3 SE = " + num(3 * se));
}

void metric_properties() {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd(0, 0.15);
  std::uniform_int_distribution<int> size(0, 200);
  const auto grid = default_rmsr_grid();
  long violations = 0;
  for (int k = 0; k < 10000; ++k) {
    std::vector<double> r(size(rng));
    for (auto& x : r) x = nd(rng);
    const auto c = cumulative_rmsr(r, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      violations += c.values[j] > grid[j];
      if (j > 0) violations += c.values[j] < c.values[j - 1];
    }
  }
  report("rmsr_monotone_bounded", violations == 0,
         std::to_string(violations) + " violations over 10000 residual sets");

  int threshold_mismatch = 0;
  long range_violations = 0;
  const auto tgrid = default_threshold_grid();
  for (int set = 0; set < 20; ++set) {
    SynthTraceParams p;
    p.pick_error_sd_s = 0.05 + 0.01 * set;
    p.miss_rate = 0.1 + 0.01 * set;
    p.false_bump_rate = 0.3 + 0.05 * set;
    p.bump_height = 0.5 + 0.02 * set;
    p.background_level = 0.02 * (set % 4);
    p.seed = 300 + set;
    std::mt19937_64 prng(set);
    std::uniform_int_distribution<std::int64_t> pi(300, 1700);
    std::vector<LabeledTrace> v;
    std::vector<oracle::LabeledCase> cases;
    for (int k = 0; k < 30; ++k) {
      WaveformRecord w;
      w.waveform_id = "v" + std::to_string(k);
      w.n_samples = 2000;
      if (k < 20) {
        w.source_id = "s";
        w.p_arrival_index = pi(prng);
      } else {
        w.kind = WaveformKind::noise;
      }
      v.push_back({gen_trace(w, p), w});
      cases.push_back({v.back().trace, w});
    }
    const auto s = select_threshold(v, tgrid);
    threshold_mismatch += s.threshold == *oracle::best_threshold(cases, tgrid, 0.3) ? 0 : 1;
    for (double thr : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      std::vector<WaveformCounts> per;
      for (const auto& x : v) per.push_back(score_waveform(x.trace, x.record, thr));
      const auto a = accumulate(per);
      for (auto m : {try_recall(a), try_f1(a), try_noise_percent_correct(a)})
        if (m) range_violations += *m < 0.0 || *m > 1.0;
    }
  }
  report("threshold_grid_scan", threshold_mismatch == 0,
         std::to_string(threshold_mismatch) + " mismatches over 20 validation sets");
  report("metric_ranges", range_violations == 0,
         std::to_string(range_violations) + " values outside [0, 1]");
}

void stratification() {
  bool monotone = true;
  auto track = [&](const ClusterModel& m) {
    for (std::size_t i = 1; i < m.inertia_history.size(); ++i)
      monotone = monotone && m.inertia_history[i] <= m.inertia_history[i - 1] * (1 + 1e-12);
  };

  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd(0, 0.1);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 200; ++i) {
    const double c = i < 100 ? 0.0 : 10.0;
    pts.push_back({c + nd(rng), c + nd(rng)});
  }
  long misassigned = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = kmeans_fit(pts, {.k = 2, .seed = seed});
    track(m);
    const int lo = m.centroids[0].latitude < m.centroids[1].latitude ? 0 : 1;
    for (int i = 0; i < 200; ++i) misassigned += m.labels[i] != (i < 100 ? lo : 1 - lo);
  }
  report("kmeans_two_blobs", misassigned == 0,
         std::to_string(misassigned) + " misassignments across 20 seeds");

  long overlap = 0, leaks = 0, imbalance = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GeoDatasetParams p;
    p.sources_per_cluster = 10 + static_cast<int>(seed % 17);
    p.waveforms_per_source = 1 + static_cast<int>(seed % 4);
    p.seed = 1000 + seed;
    const auto g = gen_geo_dataset(p);
    const auto m = cluster_dataset(g.dataset, {.k = 20, .seed = seed});
    track(m);
    const auto plan = build_split_plan(g.dataset, m, {.take_all = true}, seed);
    imbalance += plan.test_north.source_ids.size() != plan.test_south.source_ids.size();

    std::map<std::string, int> waveform_split;
    auto place = [&](const std::string& wid, int split) {
      overlap += !waveform_split.emplace(wid, split).second;
    };
    for (const auto& w : plan.test_members) place(w, 0);
    for (const auto& w : plan.validation_members) place(w, 1);
    std::map<std::string, int> source_split;
    for (const auto& s : plan.test_north.source_ids) source_split[s] = 0;
    for (const auto& s : plan.test_south.source_ids) source_split[s] = 0;
    for (const auto& s : plan.validation_sources) source_split[s] = 1;
    for (const auto& [c, pool] : plan.training_pools) {
      for (const auto& s : pool.sources) {
        leaks += source_split.contains(s.source_id);
        source_split[s.source_id] = 2;
        for (const auto& w : s.waveform_ids) place(w, 2);
      }
      for (const auto& w : pool.noise_waveform_ids) place(w, 2);
    }
    for (const auto& [sid, split] : source_split)
      for (std::size_t i : g.dataset.waveforms_of_source(sid)) {
        const auto it = waveform_split.find(g.dataset.waveforms()[i].waveform_id);
        leaks += it == waveform_split.end() || it->second != split;
      }
  }
  report("split_disjoint_leak_free_balanced", overlap == 0 && leaks == 0 && imbalance == 0,
         "over 100 datasets: " + std::to_string(overlap) + " shared waveforms, " +
             std::to_string(leaks) + " leaked sources, " + std::to_string(imbalance) +
             " unbalanced north/south test sets");

  GeoDatasetParams p;
  p.n_clusters = 20;
  p.sources_per_cluster = 800;
  p.waveforms_per_source = 1;
  for (int i = 0; i < 20; ++i) p.centers.push_back({-40.0 + 2.0 * i, 10.0 + 0.5 * (i % 2)});
  p.seed = 3;
  auto g = gen_geo_dataset(p);
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
  ClusterModel model;
  model.k = 20;
  model.centroids = g.centers;
  assign_dataset(model, d);
  const auto plan = build_split_plan(d, model, {}, 1);
  report("validation_sources_per_cluster", plan.validation_sources_per_cluster == 159,
         std::to_string(plan.validation_sources_per_cluster) + " per cluster (smallest training cluster " +
             std::to_string(plan.min_training_cluster_sources) + " sources)");
  report("kmeans_inertia_monotone", monotone, monotone ? "every run" : "inertia increased");
}

std::string pipeline_bytes(std::uint64_t seed) {
  std::string out;
  GeoDatasetParams gp;
  gp.sources_per_cluster = 12;
  gp.seed = seed;
  const auto g = gen_geo_dataset(gp);
  std::ostringstream meta;
  write_metadata(meta, g.dataset);
  out += meta.str();
  const auto model = cluster_dataset(g.dataset, {.k = 20, .seed = seed});
  out += dump_document(serialize(model));
  const auto plan = build_split_plan(g.dataset, model, {.take_all = true}, seed);
  out += dump_document(serialize(plan));
  const DesignSpec design{3, {1, 3}, 2, 2};
  out += dump_document(serialize(sample_cluster_sets(plan, design, 3, seed)));

  SynthTraceParams tp;
  tp.false_bump_rate = 0.5;
  tp.pick_error_sd_s = 0.1;
  tp.seed = seed;
  std::vector<WaveformCounts> counts;
  std::vector<ProbabilityTrace> traces;
  for (const auto& w : g.dataset.waveforms()) {
    auto t = aggregate_windows(gen_window_outputs(gen_trace(w, tp)), w.n_samples);
    counts.push_back(score_waveform(t, w, 0.3));
    traces.push_back(std::move(t));
  }
  std::ostringstream tr;
  write_probability_traces(tr, traces);
  out += tr.str();
  out += dump_document(serialize(accumulate(counts)));

  MetricModelParams mp;
  mp.grand_mean = 0.8;
  mp.model_effects = {0.02, -0.02, 0.0};
  mp.quantity_effects = {-0.05, -0.025, 0.0, 0.025, 0.05};
  mp.var_data = {4e-4};
  mp.var_train = {1e-4};
  const auto table = gen_metrics("recall", DesignSpec{}, mp, seed);
  out += dump_document(serialize(fit(table)));
  out += dump_document(serialize(rank_probabilities(scores_for_quantity(table, 2), Direction::higher_is_better)));
  return out;
}

std::string read_tree(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    all += fs::relative(f, root).string() + "\n";
    all.append(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return all;
}

bool cli_run(const std::string& exe, const fs::path& config, const fs::path& out) {
  for (const char* step : {"synth", "cluster", "split", "sample-sets", "aggregate", "threshold", "pick", "score",
                           "fit", "rank", "diagnose", "report"}) {
    const std::string cmd = "\"" + exe + "\" " + step + " --config \"" + config.string() + "\" --out \"" +
                            out.string() + "\" --quiet";
    if (std::system(cmd.c_str()) != 0) return false;
  }
  return true;
}

void determinism(const char* cli, const char* config) {
  const bool same = pipeline_bytes(7) == pipeline_bytes(7);
  const bool differs = pipeline_bytes(7) != pipeline_bytes(8);
  std::string detail = same ? "library pipeline rerun identical" : "library pipeline rerun differs";
  bool pass = same && differs;
  if (cli && config) {
    const fs::path base = fs::temp_directory_path() / "pbench_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);
    const bool ran = cli_run(cli, config, base / "a") && cli_run(cli, config, base / "b");
    const bool cli_same = ran && read_tree(base / "a") == read_tree(base / "b");
    pass = pass && cli_same;
    detail += ran ? (cli_same ? "; CLI output trees identical" : "; CLI output trees differ")
                  : "; CLI run failed";
    fs::remove_all(base);
  }
  report("determinism", pass, detail);
}

void qq_sanity() {
  Rng rng(12);
  std::vector<double> r(10000);
  for (auto& x : r) x = 0.01 * standard_normal(rng);
  const double c = qq_correlation(qq_data(r));
  report("qq_correlation", c > 0.999, "correlation " + num(c) + " at n=10000");
}

}  // namespace

int main(int argc, char** argv) {
  design_enumeration();
  estimator_recovery();
  negative_variance();
  rank_probabilities_check();
  pick_pipeline();
  metric_properties();
  stratification();
  determinism(argc > 2 ? argv[1] : nullptr, argc > 2 ? argv[2] : nullptr);
  qq_sanity();
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
