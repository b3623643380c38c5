#pragma once

#include "pagets/incremental_model.hpp"
#include "pagets/query.hpp"

namespace pagets {

struct RollingForecast {
  Eigen::MatrixXd mean;      // N x H
  Eigen::MatrixXd variance;  // N x H, zero without uq
};

/// Forecasts `future` (N x H raw observations, NaN = missing) `block` steps
/// at a time: every block is predicted from the model as it stands, then its
/// observations are inserted.
RollingForecast rolling_forecast(PredictionModel& model, const Eigen::MatrixXd& future, Index block,
                                 bool with_uq = false);

/// Imputed means (and variances) for every series over [t1, t2].
RollingForecast impute_range(const PredictionModel& model, Index t1, Index t2, bool with_uq = false);

}  // namespace pagets
