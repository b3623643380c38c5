#include "pagets/evaluation.hpp"

#include "pagets/error.hpp"

#include <vector>

namespace pagets {

RollingForecast rolling_forecast(PredictionModel& model, const Eigen::MatrixXd& future, Index block, bool with_uq) {
  if (block < 1) throw Error(ErrorCode::InvalidParams, "block must be >= 1");
  if (future.rows() != model.num_series())
    throw Error(ErrorCode::WidthMismatch, "future rows do not match the series count");
  const Index N = future.rows();
  const Index H = future.cols();
  RollingForecast out{Eigen::MatrixXd::Zero(N, H), Eigen::MatrixXd::Zero(N, H)};
  QueryOptions opts;
  opts.with_uq = with_uq;
  std::vector<double> row(static_cast<std::size_t>(N));
  for (Index b = 0; b < H; b += block) {
    const Index len = std::min(block, H - b);
    const Index T = model.length();
    for (Index n = 0; n < N; ++n) {
      const auto res = predict_range(model, n, T, T + len - 1, opts);
      for (Index s = 0; s < len; ++s) {
        out.mean(n, b + s) = res[static_cast<std::size_t>(s)].mean;
        out.variance(n, b + s) = res[static_cast<std::size_t>(s)].variance;
      }
    }
    for (Index s = 0; s < len; ++s) {
      for (Index n = 0; n < N; ++n) row[static_cast<std::size_t>(n)] = future(n, b + s);
      model.insert(row);
    }
  }
  return out;
}

RollingForecast impute_range(const PredictionModel& model, Index t1, Index t2, bool with_uq) {
  if (t2 < t1) throw Error(ErrorCode::OutOfRange, "range end precedes its start");
  const Index N = model.num_series();
  RollingForecast out{Eigen::MatrixXd::Zero(N, t2 - t1 + 1), Eigen::MatrixXd::Zero(N, t2 - t1 + 1)};
  QueryOptions opts;
  opts.with_uq = with_uq;
  for (Index n = 0; n < N; ++n) {
    const auto res = predict_range(model, n, t1, t2, opts);
    for (Index s = 0; s <= t2 - t1; ++s) {
      out.mean(n, s) = res[static_cast<std::size_t>(s)].mean;
      out.variance(n, s) = res[static_cast<std::size_t>(s)].variance;
    }
  }
  return out;
}

}  // namespace pagets
