#pragma once

#include "pagets/ingestion.hpp"

#include <span>
#include <string>
#include <vector>

namespace pagets {

/// RMSE after standardising both sides by the truth's mean and (population) std.
double nrmse(std::span<const double> pred, std::span<const double> truth);
/// sqrt of the mean of per-row squared NRMSE over rows of N x T matrices.
double pooled_nrmse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth);
/// 1 - SS_res / SS_tot.
double r_squared(std::span<const double> pred, std::span<const double> truth);

/// Errors e(a, x) for every algorithm a and experiment x.
struct ExperimentGrid {
  std::vector<std::string> algorithms;
  std::vector<std::string> experiments;
  Eigen::MatrixXd errors;  // algorithms x experiments; NaN marks a hole

  /// IncompleteGrid unless the shape matches and every entry is finite and >= 0.
  void validate() const;
};

/// Weighted Borda count per algorithm, in [0, 1]; 0/0 pair terms count 0.5.
Eigen::VectorXd wbc(const ExperimentGrid& grid);

}  // namespace pagets
