#include "pagets/query.hpp"

#include "pagets/error.hpp"
#include "pagets/estimator.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

namespace pagets {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double factor_entry(const TruncatedSVD& f, Index row, Index col, QueryStats* stats) {
  double acc = 0.0;
  for (Index k = 0; k < f.rank(); ++k) acc += f.U(row, k) * f.s(k) * f.V(col, k);
  if (stats) stats->factor_reads += static_cast<std::size_t>(3 * f.rank());
  return acc;
}

// Last `lags` values before time `end` (exclusive), oldest first; unknown -> 0.
std::vector<double> history_before(const PredictionModel& model, Index n, Index end, Index lags) {
  std::vector<double> h(static_cast<std::size_t>(lags), 0.0);
  for (Index r = 0; r < lags; ++r) {
    const Index t = end - lags + r;
    if (t < 0) continue;
    if (auto v = model.raw_value(n, t)) h[static_cast<std::size_t>(r)] = *v;
  }
  return h;
}

std::vector<double> squared(std::vector<double> v) {
  for (double& x : v) x *= x;
  return v;
}

double dot(const Eigen::VectorXd& beta, const std::vector<double>& h) {
  double acc = 0.0;
  for (Index r = 0; r < beta.size(); ++r) acc += beta(r) * h[static_cast<std::size_t>(r)];
  return acc;
}

void check_request(const PredictionModel& model, Index n, Index t, const QueryOptions& opts) {
  if (n < 0 || n >= model.num_series())
    throw Error(ErrorCode::UnknownSeries, "series index " + std::to_string(n) + " out of range");
  if (t < 0) throw Error(ErrorCode::OutOfRange, "time index must be >= 0");
  if (!(opts.confidence > 0.0 && opts.confidence < 100.0))
    throw Error(ErrorCode::InvalidConfidence, "confidence must lie in (0, 100)");
}

PredictionResult finish(double mean, double variance, PredictionKind kind, const QueryOptions& opts) {
  PredictionResult r;
  r.kind = kind;
  r.confidence = opts.confidence;
  r.method = opts.method;
  r.with_uq = opts.with_uq;
  r.mean = mean;
  if (opts.with_uq) {
    r.variance = std::max(0.0, variance);
    std::tie(r.lo, r.hi) = prediction_interval(mean, std::sqrt(r.variance), opts.confidence, opts.method);
  } else {
    r.lo = r.hi = mean;
  }
  return r;
}

PredictionResult fallback_result(const PredictionModel& model, Index n, Index t, const QueryOptions& opts) {
  const auto m = model.fallback_mean(n);
  if (!m) throw Error(ErrorCode::UntrainedModel, "model holds no observations");
  PredictionResult r = finish(*m, model.fallback_variance(n),
                              t < model.length() ? PredictionKind::Imputed : PredictionKind::Forecast, opts);
  r.fallback = true;
  r.lo = -kInf;
  r.hi = kInf;
  return r;
}

PredictionResult impute(const PredictionModel& model, Index n, Index t, const QueryOptions& opts,
                        QueryStats* stats) {
  const auto& subs = model.submodels();
  const Index newest = t / model.half_span();
  double mean = 0.0;
  double variance = 0.0;
  int used = 0;
  for (Index i = std::max<Index>(0, newest - 1); i <= newest && i < static_cast<Index>(subs.size()); ++i) {
    const SubModel& sm = subs[static_cast<std::size_t>(i)];
    if (!sm.covers(t)) continue;
    const Index local = t - sm.start;
    const Index row = local % sm.L;
    const Index col = sm.column_of(n, local / sm.L);
    const double m = factor_entry(sm.mean.full, row, col, stats);
    mean += m;
    if (opts.with_uq) variance += std::max(0.0, factor_entry(sm.var.full, row, col, stats) - m * m);
    ++used;
  }
  if (used > 0) return finish(mean / used, variance / used, PredictionKind::Imputed, opts);

  // Not yet covered by a complete Page column: one-step prediction from the preceding values.
  const CoefficientAverage& avg = model.cached_coefficients();
  const std::vector<double> h = history_before(model, n, t, avg.mean.size());
  const double m = dot(avg.mean, h);
  const double v = opts.with_uq ? dot(avg.var, squared(h)) - m * m : 0.0;
  return finish(m, v, PredictionKind::Imputed, opts);
}

std::vector<PredictionResult> forecast(const PredictionModel& model, Index n, Index t1, Index t2,
                                       const QueryOptions& opts) {
  const CoefficientAverage& avg = model.cached_coefficients();
  const Index T = model.length();
  const Index steps = t2 - T + 1;
  const std::vector<double> h = history_before(model, n, T, avg.mean.size());
  const Eigen::VectorXd gm = forecast_path(avg.mean, h, steps);
  Eigen::VectorXd gv;
  if (opts.with_uq) gv = forecast_path(avg.var, squared(h), steps);
  std::vector<PredictionResult> out;
  for (Index t = std::max(t1, T); t <= t2; ++t) {
    const Index s = t - T;
    out.push_back(finish(gm(s), opts.with_uq ? gv(s) - gm(s) * gm(s) : 0.0, PredictionKind::Forecast, opts));
  }
  return out;
}

}  // namespace

std::string_view to_string(PredictionKind kind) { return kind == PredictionKind::Imputed ? "imputed" : "forecast"; }

std::string_view to_string(IntervalMethod method) {
  return method == IntervalMethod::Gaussian ? "gaussian" : "chebyshev";
}

IntervalMethod parse_interval_method(std::string_view text) {
  if (text == "gaussian") return IntervalMethod::Gaussian;
  if (text == "chebyshev") return IntervalMethod::Chebyshev;
  throw Error(ErrorCode::InvalidParams, "unknown interval method '" + std::string(text) + "'");
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    return std::numeric_limits<double>::quiet_NaN();
  }
  // Acklam's rational approximation.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step on the exact CDF brings the error to machine precision.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

std::pair<double, double> prediction_interval(double mean, double sigma, double confidence, IntervalMethod method) {
  if (!(confidence > 0.0 && confidence < 100.0))
    throw Error(ErrorCode::InvalidConfidence, "confidence must lie in (0, 100)");
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidParams, "sigma must be >= 0");
  const double half = method == IntervalMethod::Gaussian
                          ? sigma * normal_quantile(0.5 + confidence / 200.0)
                          : sigma / std::sqrt(1.0 - confidence / 100.0);
  return {mean - half, mean + half};
}

CoefficientAverage average_coefficients(const PredictionModel& model, Index m) {
  if (!model.trained()) throw Error(ErrorCode::UntrainedModel, "no trained sub-model");
  if (m == model.hyper_params().coeff_window) return model.cached_coefficients();
  return model.coefficient_average(m);
}

Index series_index(const PredictionModel& model, std::string_view name) {
  const auto& names = model.names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<Index>(i);
  throw Error(ErrorCode::UnknownSeries, "no series named '" + std::string(name) + "'");
}

PredictionResult predict_point(const PredictionModel& model, Index n, Index t, const QueryOptions& opts,
                               QueryStats* stats) {
  check_request(model, n, t, opts);
  if (!model.trained()) return fallback_result(model, n, t, opts);
  if (t < model.length()) return impute(model, n, t, opts, stats);
  return forecast(model, n, t, t, opts).back();
}

std::vector<PredictionResult> predict_range(const PredictionModel& model, Index n, Index t1, Index t2,
                                            const QueryOptions& opts, QueryStats* stats) {
  check_request(model, n, t1, opts);
  if (t2 < t1) throw Error(ErrorCode::OutOfRange, "range end precedes its start");
  std::vector<PredictionResult> out;
  out.reserve(static_cast<std::size_t>(t2 - t1 + 1));
  if (!model.trained()) {
    for (Index t = t1; t <= t2; ++t) out.push_back(fallback_result(model, n, t, opts));
    return out;
  }
  for (Index t = t1; t <= t2 && t < model.length(); ++t) out.push_back(impute(model, n, t, opts, stats));
  if (t2 >= model.length()) {
    auto tail = forecast(model, n, t1, t2, opts);
    out.insert(out.end(), tail.begin(), tail.end());
  }
  return out;
}

}  // namespace pagets
