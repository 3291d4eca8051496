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

#include "pbench/statframe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/policies/policy.hpp>

#include "pbench/error.hpp"
#include "pbench/parallel.hpp"

namespace pbench {

namespace {

namespace bm = boost::math;
using QuietPolicy = bm::policies::policy<bm::policies::overflow_error<bm::policies::ignore_error>>;

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
}

void check_shape(std::span<const double> values, int cluster_sets, int initializations) {
  if (cluster_sets < 2 || initializations < 2)
    throw ValidationError("variance separation needs at least 2 cluster sets and 2 initializations");
  if (values.size() != static_cast<std::size_t>(cluster_sets) * initializations)
    throw ValidationError("cell size does not match cluster_sets x initializations");
  for (double v : values)
    if (!std::isfinite(v)) throw ValidationError("cell contains a non-finite value");
}

double normal_quantile(double p) { return bm::quantile(bm::normal_distribution<double>(), p); }

double chi2_quantile(double df, double p) {
  return bm::quantile(bm::chi_squared_distribution<double, QuietPolicy>(df), p);
}

}  // namespace

MeanSquares mean_squares(std::span<const double> values, int cluster_sets, int initializations) {
  check_shape(values, cluster_sets, initializations);
  const auto D = static_cast<std::size_t>(cluster_sets);
  const auto I = static_cast<std::size_t>(initializations);
  std::vector<double> set_means(D, 0.0);
  for (std::size_t d = 0; d < D; ++d) {
    double s = 0.0;
    for (std::size_t i = 0; i < I; ++i) s += values[d * I + i];
    set_means[d] = s / static_cast<double>(I);
  }
  MeanSquares ms;
  ms.grand_mean = std::accumulate(set_means.begin(), set_means.end(), 0.0) / static_cast<double>(D);
  ms.df_between = cluster_sets - 1;
  ms.df_within = cluster_sets * (initializations - 1);
  double ss_between = 0.0;
  double ss_within = 0.0;
  for (std::size_t d = 0; d < D; ++d) {
    const double dev = set_means[d] - ms.grand_mean;
    ss_between += dev * dev;
    for (std::size_t i = 0; i < I; ++i) {
      const double r = values[d * I + i] - set_means[d];
      ss_within += r * r;
    }
  }
  ms.between = static_cast<double>(I) * ss_between / ms.df_between;
  ms.within = ss_within / ms.df_within;
  return ms;
}

VarianceComponents variance_components(std::span<const double> values, int cluster_sets,
                                       int initializations, double ci_level) {
  check_level(ci_level);
  VarianceComponents vc;
  vc.mean_squares = mean_squares(values, cluster_sets, initializations);
  const MeanSquares& ms = vc.mean_squares;
  const double alpha = 1.0 - ci_level;
  const double I = initializations;

  vc.train.estimate = ms.within;
  vc.train.df = ms.df_within;
  vc.train.ci = {ms.df_within * ms.within / chi2_quantile(ms.df_within, 1.0 - alpha / 2.0),
                 ms.df_within * ms.within / chi2_quantile(ms.df_within, alpha / 2.0)};

  const double est = (ms.between - ms.within) / I;
  vc.data.estimate = est;
  vc.data.negative = est < 0.0;
  const double denom = ms.between * ms.between / ms.df_between +
                       ms.within * ms.within / ms.df_within;
  bool use_normal = !(est > 0.0);
  if (!use_normal) {
    const double nu = (ms.between - ms.within) * (ms.between - ms.within) / denom;
    const Interval satterthwaite{nu * est / chi2_quantile(nu, 1.0 - alpha / 2.0),
                                 nu * est / chi2_quantile(nu, alpha / 2.0)};
    if (std::isfinite(satterthwaite.low) && std::isfinite(satterthwaite.high)) {
      vc.data.df = nu;
      vc.data.ci = satterthwaite;
    } else {
      use_normal = true;
    }
  }
  if (use_normal) {
    const double se = std::sqrt(2.0 * denom) / I;
    const double z = normal_quantile(1.0 - alpha / 2.0);
    vc.data.df = 0.0;
    vc.data.normal_approximation = true;
    vc.data.ci = {est - z * se, est + z * se};
  }
  return vc;
}

Interval cell_mean_ci(std::span<const double> values, int cluster_sets, int initializations,
                      double ci_level, CiQuantile quantile) {
  check_level(ci_level);
  const MeanSquares ms = mean_squares(values, cluster_sets, initializations);
  const double p = 1.0 - (1.0 - ci_level) / 2.0;
  const double q = quantile == CiQuantile::gaussian
                       ? normal_quantile(p)
                       : bm::quantile(bm::students_t_distribution<double>(ms.df_between), p);
  const double half = q * std::sqrt(ms.between / (static_cast<double>(cluster_sets) * initializations));
  return {ms.grand_mean - half, ms.grand_mean + half};
}

namespace {

FitResult fit_impl(const MetricTable& table, const FitOptions& options, bool require_complete) {
  const DesignSpec& design = table.design();
  design.validate_shape();
  if (design.cluster_sets < 2 || design.initializations < 2)
    throw ValidationError("fit: need at least 2 cluster sets and 2 initializations");
  check_level(options.ci_level);
  const int M = design.models;
  const int A = design.quantities();
  const int D = design.cluster_sets;
  const int I = design.initializations;

  FitResult r;
  r.metric_name = table.metric_name();
  r.design = design;
  r.options = options;
  r.cells.resize(static_cast<std::size_t>(M) * A);
  r.interactions.assign(static_cast<std::size_t>(M) * A, 0.0);
  r.model_effects.assign(M, 0.0);
  r.quantity_effects.assign(A, 0.0);

  bool all_observed = true;
  for (int m = 0; m < M; ++m) {
    for (int a = 0; a < A; ++a) {
      CellEstimate& cell = r.cells[static_cast<std::size_t>(m) * A + a];
      cell.model = m;
      cell.quantity = a;
      if (!table.cell_complete(m, a)) {
        if (require_complete) table.cell_values(m, a);  // throws with the cell named
        all_observed = false;
        continue;
      }
      const auto values = table.cell_values(m, a);
      cell.observed = true;
      cell.variance = variance_components(values, D, I, options.ci_level);
      cell.mean = cell.variance.mean_squares.grand_mean;
      cell.mean_ci = cell_mean_ci(values, D, I, options.ci_level, options.quantile);
      for (int d = 0; d < D; ++d) {
        double s = 0.0;
        for (int i = 0; i < I; ++i) s += values[static_cast<std::size_t>(d) * I + i];
        const double set_mean = s / I;
        for (int i = 0; i < I; ++i)
          r.residuals_train.push_back(
              {{m, a, d, i}, values[static_cast<std::size_t>(d) * I + i] - set_mean});
        r.residuals_data.push_back({m, a, d, set_mean - cell.mean});
      }
    }
  }

  r.effects_defined = all_observed;
  if (!all_observed) return r;

  std::vector<double> model_mean(M, 0.0), quantity_mean(A, 0.0);
  double grand = 0.0;
  for (int m = 0; m < M; ++m) {
    for (int a = 0; a < A; ++a) {
      const double y = r.cell(m, a).mean;
      model_mean[m] += y / A;
      quantity_mean[a] += y / M;
      grand += y;
    }
  }
  grand /= static_cast<double>(M) * A;
  r.grand_mean = grand;
  for (int m = 0; m < M; ++m) r.model_effects[m] = model_mean[m] - grand;
  for (int a = 0; a < A; ++a) r.quantity_effects[a] = quantity_mean[a] - grand;
  for (int m = 0; m < M; ++m)
    for (int a = 0; a < A; ++a)
      r.interactions[static_cast<std::size_t>(m) * A + a] =
          r.cell(m, a).mean - model_mean[m] - quantity_mean[a] + grand;
  return r;
}

}  // namespace

FitResult fit(const MetricTable& table, const FitOptions& options) {
  return fit_impl(table, options, /*require_complete=*/true);
}

std::vector<FitResult> functional_fit(const FunctionalMetricTable& tables, const FitOptions& options) {
  if (tables.grid.size() != tables.tables.size())
    throw ValidationError("functional_fit: grid and table counts differ");
  for (const auto& t : tables.tables)
    if (!(t.design() == tables.tables.front().design()))
      throw ValidationError("functional_fit: tables do not share a design");
  std::vector<FitResult> out(tables.tables.size());
  parallel_for(out.size(), [&](std::size_t g) {
    out[g] = fit_impl(tables.tables[g], options, /*require_complete=*/false);
  });
  return out;
}

std::vector<QQPoint> qq_data(std::span<const double> residuals) {
  const std::size_t n = residuals.size();
  if (n < 3) throw ValidationError("qq_data: need at least 3 residuals");
  std::vector<double> sorted(residuals.begin(), residuals.end());
  std::sort(sorted.begin(), sorted.end());

  auto sample_sd = [](std::span<const double> v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
  };
  std::vector<double> quantiles(n);
  for (std::size_t k = 0; k < n; ++k)
    quantiles[k] = normal_quantile((static_cast<double>(k) + 0.5) / static_cast<double>(n));
  const double scale = sample_sd(sorted) / sample_sd(quantiles);

  std::vector<QQPoint> points(n);
  for (std::size_t k = 0; k < n; ++k) points[k] = {scale * quantiles[k], sorted[k]};
  return points;
}

double qq_correlation(std::span<const QQPoint> points) {
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p.theoretical;
    my += p.sample;
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (const auto& p : points) {
    sxy += (p.theoretical - mx) * (p.sample - my);
    sxx += (p.theoretical - mx) * (p.theoretical - mx);
    syy += (p.sample - my) * (p.sample - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> residual_values(std::span<const TrainResidual> residuals) {
  std::vector<double> v;
  v.reserve(residuals.size());
  for (const auto& r : residuals) v.push_back(r.value);
  return v;
}

std::vector<double> residual_values(std::span<const DataResidual> residuals) {
  std::vector<double> v;
  v.reserve(residuals.size());
  for (const auto& r : residuals) v.push_back(r.value);
  return v;
}

}  // namespace pbench
