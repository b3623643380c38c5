#pragma once

#include "pagets/ingestion.hpp"
#include "pagets/page_matrix.hpp"
#include "pagets/svd.hpp"

#include <optional>
#include <span>

namespace pagets {

/// Hard-thresholded reconstruction of one stacked Page matrix.
struct DenoisedSegment {
  Eigen::MatrixXd mhat;  // == svd.reconstruct()
  TruncatedSVD svd;
  Index L = 0;
  Index P = 0;
  Index N = 0;
};

/// Keeps the top k singular triplets of `m`; k chosen by select_rank when absent.
DenoisedSegment denoise(const StackedPageMatrix& m, std::optional<Index> k = std::nullopt);

/// Estimates on the N x T grid. Columns t >= covered (the trailing remainder
/// that does not fill a Page column) carry the raw observation through and
/// are flagged by `covered`.
struct Imputation {
  Eigen::MatrixXd estimate;  // N x T
  Index covered = 0;         // L * P
  DenoisedSegment segment;

  bool in_segment(Index t) const { return t < covered; }
};

Imputation impute_mean(const TimeSeriesBatch& batch, Index L, std::optional<Index> k = std::nullopt);

/// Last-row regression through the truncated SVD of the first L-1 rows.
struct ForecastModel {
  Eigen::VectorXd beta;  // L-1 coefficients, oldest lag first
  TruncatedSVD svd_tilde;
  Index L = 0;
  bool degenerate = false;  // every retained singular value was zero
};

/// Minimum-norm coefficients b with M_tilde^T b ~= last_row, where M_tilde is
/// the rank-k reconstruction held by `tilde`. Zero singular values are skipped.
Eigen::VectorXd pcr_coefficients(const TruncatedSVD& tilde, const Eigen::Ref<const Eigen::VectorXd>& last_row,
                                 bool* degenerate = nullptr);

ForecastModel fit_forecaster(const StackedPageMatrix& m, std::optional<Index> k = std::nullopt);
ForecastModel fit_forecaster(const TimeSeriesBatch& batch, Index L, std::optional<Index> k = std::nullopt);

/// history.size() == L-1, oldest first; NaN entries count as 0.
double forecast_mean(const ForecastModel& fm, std::span<const double> history);

/// Applies `beta` (oldest lag first) autoregressively for `steps` steps after
/// `history` and returns the produced values. history.size() must be >= beta.size().
Eigen::VectorXd forecast_path(const Eigen::Ref<const Eigen::VectorXd>& beta, std::span<const double> history,
                              Index steps);

struct VarianceImputation {
  Eigen::MatrixXd mean;           // N x T
  Eigen::MatrixXd second_moment;  // N x T
  Eigen::MatrixXd variance;       // N x T, clamped at 0
  Index covered = 0;
};

/// Runs the mean imputation on X and on X^2 and returns max(0, E[X^2] - E[X]^2).
VarianceImputation impute_variance(const TimeSeriesBatch& batch, Index L, std::optional<Index> k_mean = std::nullopt,
                                   std::optional<Index> k_var = std::nullopt);

struct VarianceForecaster {
  ForecastModel mean;
  ForecastModel second_moment;
};

VarianceForecaster fit_variance_forecaster(const TimeSeriesBatch& batch, Index L,
                                           std::optional<Index> k_mean = std::nullopt,
                                           std::optional<Index> k_var = std::nullopt);

/// One-step variance forecast from the raw history (squared internally).
double forecast_variance(const VarianceForecaster& vf, std::span<const double> history);

}  // namespace pagets
