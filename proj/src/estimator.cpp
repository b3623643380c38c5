#include "pagets/estimator.hpp"

#include "pagets/error.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace pagets {

DenoisedSegment denoise(const StackedPageMatrix& m, std::optional<Index> k) {
  const Index max_rank = std::min(m.rows(), m.cols());
  if (k && (*k < 1 || *k > max_rank))
    throw Error(ErrorCode::RankOutOfRange,
                "k=" + std::to_string(*k) + " outside [1, " + std::to_string(max_rank) + "]");
  TruncatedSVD full = thin_svd(m.data);
  const Index rank = k ? *k : select_rank(full.s, m.rows(), m.cols());
  DenoisedSegment seg;
  seg.svd = truncate(std::move(full), rank);
  seg.mhat = seg.svd.reconstruct();
  seg.L = m.L;
  seg.P = m.P;
  seg.N = m.N;
  return seg;
}

Imputation impute_mean(const TimeSeriesBatch& batch, Index L, std::optional<Index> k) {
  batch.validate();
  const StackedPageMatrix page = build_stacked_page(batch, L, false);
  Imputation out;
  out.segment = denoise(page, k);
  out.covered = page.L * page.P;
  out.estimate = batch.values;
  for (Index n = 0; n < batch.num_series(); ++n) {
    for (Index t = 0; t < out.covered; ++t) {
      const PageCoords rc = coords_of(t, n, page.L, page.P, page.N);
      out.estimate(n, t) = out.segment.mhat(rc.row, rc.col);
    }
  }
  return out;
}

Eigen::VectorXd pcr_coefficients(const TruncatedSVD& tilde, const Eigen::Ref<const Eigen::VectorXd>& last_row,
                                 bool* degenerate) {
  if (last_row.size() != tilde.cols())
    throw Error(ErrorCode::LengthMismatch, "last row length does not match the column count");
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(tilde.rows());
  const double smax = tilde.rank() > 0 ? tilde.s.maxCoeff() : 0.0;
  const double tol = std::numeric_limits<double>::epsilon() *
                     static_cast<double>(std::max(tilde.rows(), tilde.cols())) * smax;
  bool any = false;
  for (Index j = 0; j < tilde.rank(); ++j) {
    if (!(tilde.s(j) > tol)) continue;
    any = true;
    beta += tilde.U.col(j) * (tilde.V.col(j).dot(last_row) / tilde.s(j));
  }
  if (degenerate) *degenerate = !any;
  return beta;
}

ForecastModel fit_forecaster(const StackedPageMatrix& m, std::optional<Index> k) {
  auto [tilde, last] = drop_last_row(m);
  const Index max_rank = std::min(tilde.rows(), tilde.cols());
  if (k && (*k < 1 || *k > max_rank))
    throw Error(ErrorCode::RankOutOfRange,
                "k=" + std::to_string(*k) + " outside [1, " + std::to_string(max_rank) + "]");
  TruncatedSVD full = thin_svd(tilde);
  const Index rank = k ? *k : select_rank(full.s, tilde.rows(), tilde.cols());
  ForecastModel fm;
  fm.L = m.L;
  fm.svd_tilde = truncate(std::move(full), rank);
  fm.beta = pcr_coefficients(fm.svd_tilde, last, &fm.degenerate);
  return fm;
}

ForecastModel fit_forecaster(const TimeSeriesBatch& batch, Index L, std::optional<Index> k) {
  batch.validate();
  if (L < 2) throw Error(ErrorCode::TooFewRows, "forecasting needs L >= 2");
  return fit_forecaster(build_stacked_page(batch, L, false), k);
}

double forecast_mean(const ForecastModel& fm, std::span<const double> history) {
  if (static_cast<Index>(history.size()) != fm.beta.size())
    throw Error(ErrorCode::LengthMismatch, "history has " + std::to_string(history.size()) +
                                               " values, model expects " + std::to_string(fm.beta.size()));
  double acc = 0.0;
  for (Index r = 0; r < fm.beta.size(); ++r) {
    const double h = history[static_cast<std::size_t>(r)];
    if (std::isfinite(h)) acc += fm.beta(r) * h;
  }
  return acc;
}

Eigen::VectorXd forecast_path(const Eigen::Ref<const Eigen::VectorXd>& beta, std::span<const double> history,
                              Index steps) {
  const Index lags = beta.size();
  if (static_cast<Index>(history.size()) < lags)
    throw Error(ErrorCode::LengthMismatch, "history shorter than the coefficient vector");
  std::vector<double> window(history.end() - lags, history.end());
  for (double& v : window)
    if (!std::isfinite(v)) v = 0.0;
  Eigen::VectorXd out(steps);
  for (Index s = 0; s < steps; ++s) {
    double acc = 0.0;
    const std::size_t base = window.size() - static_cast<std::size_t>(lags);
    for (Index r = 0; r < lags; ++r) acc += beta(r) * window[base + static_cast<std::size_t>(r)];
    out(s) = acc;
    window.push_back(acc);
  }
  return out;
}

VarianceImputation impute_variance(const TimeSeriesBatch& batch, Index L, std::optional<Index> k_mean,
                                   std::optional<Index> k_var) {
  batch.validate();
  const StackedPageMatrix first = build_stacked_page(batch, L, false);
  const StackedPageMatrix second = build_stacked_page(batch, L, true);
  const DenoisedSegment mean_seg = denoise(first, k_mean);
  const DenoisedSegment second_seg = denoise(second, k_var);

  VarianceImputation out;
  out.covered = first.L * first.P;
  out.mean = batch.values;
  out.second_moment = batch.values.array().square();
  out.variance = Eigen::MatrixXd::Zero(batch.num_series(), batch.length());
  for (Index n = 0; n < batch.num_series(); ++n) {
    for (Index t = 0; t < out.covered; ++t) {
      const PageCoords rc = coords_of(t, n, first.L, first.P, first.N);
      const double m = mean_seg.mhat(rc.row, rc.col);
      const double s = second_seg.mhat(rc.row, rc.col);
      out.mean(n, t) = m;
      out.second_moment(n, t) = s;
      out.variance(n, t) = std::max(0.0, s - m * m);
    }
  }
  return out;
}

VarianceForecaster fit_variance_forecaster(const TimeSeriesBatch& batch, Index L, std::optional<Index> k_mean,
                                           std::optional<Index> k_var) {
  batch.validate();
  if (L < 2) throw Error(ErrorCode::TooFewRows, "forecasting needs L >= 2");
  VarianceForecaster vf;
  vf.mean = fit_forecaster(build_stacked_page(batch, L, false), k_mean);
  vf.second_moment = fit_forecaster(build_stacked_page(batch, L, true), k_var);
  return vf;
}

double forecast_variance(const VarianceForecaster& vf, std::span<const double> history) {
  std::vector<double> squares(history.begin(), history.end());
  for (double& v : squares) v = v * v;
  const double m = forecast_mean(vf.mean, history);
  const double s = forecast_mean(vf.second_moment, squares);
  return std::max(0.0, s - m * m);
}

}  // namespace pagets
