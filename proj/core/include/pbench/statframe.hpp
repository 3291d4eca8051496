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

#ifndef PBENCH_STATFRAME_HPP_
#define PBENCH_STATFRAME_HPP_

#include <span>
#include <string>
#include <vector>

#include "pbench/design.hpp"

namespace pbench {

// Model for one metric:
//   y[m][a][d][i] = grand + model[m] + quantity[a] + interaction[m][a]
//                   + e_data[m][a][d] + e_train[m][a][d][i]
// with e_data ~ N(0, var_data[m][a]) and e_train ~ N(0, var_train[m][a]).
// Effects use sum-to-zero identification; variance components come from the
// balanced nested ANOVA mean squares of each (model, quantity) cell.

enum class CiQuantile { gaussian, student_t };

struct FitOptions {
  double ci_level = 0.90;
  // Cell-mean intervals: Student-t with cluster_sets - 1 df, or Gaussian z.
  CiQuantile quantile = CiQuantile::student_t;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
  double width() const { return high - low; }
  bool contains(double x) const { return low <= x && x <= high; }
};

struct MeanSquares {
  double grand_mean = 0.0;
  double between = 0.0;  // I * sum_d (mean_d - mean)^2 / (D - 1)
  double within = 0.0;   // sum_d sum_i (y_di - mean_d)^2 / (D (I - 1))
  int df_between = 0;
  int df_within = 0;
};

struct VarianceEstimate {
  double estimate = 0.0;
  Interval ci;
  double df = 0.0;        // chi-square (or Satterthwaite) degrees of freedom
  bool negative = false;  // data component only; reported, never truncated
  bool normal_approximation = false;
};

struct VarianceComponents {
  MeanSquares mean_squares;
  VarianceEstimate train;
  VarianceEstimate data;
};

// `values` holds cluster_sets x initializations entries, row-major by cluster set.
MeanSquares mean_squares(std::span<const double> values, int cluster_sets, int initializations);

// Training variance = MS_within with a chi-square interval on D(I-1) df.
// Data variance = (MS_between - MS_within) / I with a Satterthwaite interval;
// when that estimate is not positive the interval is the normal approximation
// on the mean-square difference.
VarianceComponents variance_components(std::span<const double> values, int cluster_sets,
                                       int initializations, double ci_level = 0.90);

// mean +/- q * sqrt(MS_between / (D I)).
Interval cell_mean_ci(std::span<const double> values, int cluster_sets, int initializations,
                      double ci_level = 0.90, CiQuantile quantile = CiQuantile::student_t);

struct CellEstimate {
  int model = 0;
  int quantity = 0;
  bool observed = false;
  double mean = 0.0;
  Interval mean_ci;
  VarianceComponents variance;
};

struct TrainResidual {
  ModelInstanceKey key;
  double value = 0.0;  // y - mean over inits of (m, a, d)
};

struct DataResidual {
  int model = 0;
  int quantity = 0;
  int cluster_set = 0;
  double value = 0.0;  // mean of (m, a, d) - cell mean of (m, a)
};

struct FitResult {
  std::string metric_name;
  DesignSpec design;
  FitOptions options;
  bool effects_defined = false;  // false when some cell is unobserved
  double grand_mean = 0.0;
  std::vector<double> model_effects;
  std::vector<double> quantity_effects;
  std::vector<double> interactions;  // models x quantities, row-major
  std::vector<CellEstimate> cells;   // models x quantities, row-major
  std::vector<TrainResidual> residuals_train;
  std::vector<DataResidual> residuals_data;

  const CellEstimate& cell(int model, int quantity) const {
    return cells[static_cast<std::size_t>(model) * design.quantities() + quantity];
  }
  double interaction(int model, int quantity) const {
    return interactions[static_cast<std::size_t>(model) * design.quantities() + quantity];
  }
};

// Requires every cell fully observed and cluster_sets, initializations >= 2.
FitResult fit(const MetricTable& table, const FitOptions& options = {});

// Independent fit at every grid point. A cell with any masked value at a
// point is reported unobserved there instead of failing the point.
std::vector<FitResult> functional_fit(const FunctionalMetricTable& tables,
                                      const FitOptions& options = {});

struct QQPoint {
  double theoretical = 0.0;
  double sample = 0.0;
};

// Sorted residuals against Gaussian quantiles at (k - 0.5) / n, rescaled so
// the theoretical quantiles share the residuals' sample standard deviation
// (mean 0). Requires n >= 3.
std::vector<QQPoint> qq_data(std::span<const double> residuals);

// Pearson correlation of the QQ pairs.
double qq_correlation(std::span<const QQPoint> points);

std::vector<double> residual_values(std::span<const TrainResidual> residuals);
std::vector<double> residual_values(std::span<const DataResidual> residuals);

}  // namespace pbench

#endif  // PBENCH_STATFRAME_HPP_
