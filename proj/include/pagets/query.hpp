#pragma once

#include "pagets/incremental_model.hpp"

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

namespace pagets {

enum class PredictionKind { Imputed, Forecast };
enum class IntervalMethod { Gaussian, Chebyshev };

std::string_view to_string(PredictionKind kind);
std::string_view to_string(IntervalMethod method);
/// "gaussian" or "chebyshev"; InvalidParams otherwise.
IntervalMethod parse_interval_method(std::string_view text);

struct PredictionResult {
  double mean = 0.0;
  double variance = 0.0;  // 0 when uq is off
  double lo = 0.0;
  double hi = 0.0;
  PredictionKind kind = PredictionKind::Imputed;
  double confidence = 95.0;
  IntervalMethod method = IntervalMethod::Gaussian;
  bool with_uq = true;
  bool fallback = false;  // untrained model: running mean, infinite interval
};

struct QueryOptions {
  double confidence = 95.0;
  IntervalMethod method = IntervalMethod::Gaussian;
  bool with_uq = true;
};

/// Instrumentation: number of stored factor entries read.
struct QueryStats {
  std::size_t factor_reads = 0;
};

/// Standard normal quantile, |error| < 1e-12 on (0, 1).
double normal_quantile(double p);

/// Gaussian: mean +- sigma * z(1/2 + c/200). Chebyshev: mean +- sigma / sqrt(1 - c/100).
std::pair<double, double> prediction_interval(double mean, double sigma, double confidence, IntervalMethod method);

/// Averaged coefficients over the last min(m, available) trained sub-models.
CoefficientAverage average_coefficients(const PredictionModel& model, Index m);

/// Index of the series called `name`; UnknownSeries otherwise.
Index series_index(const PredictionModel& model, std::string_view name);

/// t < length(): imputation; t >= length(): forecast of step t.
PredictionResult predict_point(const PredictionModel& model, Index n, Index t, const QueryOptions& opts = {},
                               QueryStats* stats = nullptr);

/// Same as predict_point for every t in [t1, t2]; the forecast suffix shares one recursion.
std::vector<PredictionResult> predict_range(const PredictionModel& model, Index n, Index t1, Index t2,
                                            const QueryOptions& opts = {}, QueryStats* stats = nullptr);

}  // namespace pagets
