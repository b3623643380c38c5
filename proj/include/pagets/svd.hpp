#pragma once

#include <Eigen/Dense>

#include <span>

namespace pagets {

using Index = Eigen::Index;

/// Rank-k factors of a rows x cols matrix: U diag(s) V^T.
/// Columns of U and V are orthonormal, s is nonincreasing. Each singular
/// pair is signed so that the largest-magnitude entry of its U column is
/// positive.
struct TruncatedSVD {
  Eigen::MatrixXd U;
  Eigen::VectorXd s;
  Eigen::MatrixXd V;

  Index rank() const { return s.size(); }
  Index rows() const { return U.rows(); }
  Index cols() const { return V.rows(); }

  Eigen::MatrixXd reconstruct() const;
  /// Single entry of the reconstruction; touches 2*rank() factor entries.
  double entry(Index row, Index col) const;
};

/// Thin SVD keeping all min(rows, cols) singular triplets.
TruncatedSVD thin_svd(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Best rank-k approximation (Frobenius norm). Requires 1 <= k <= min(rows, cols).
TruncatedSVD truncated_svd(const Eigen::Ref<const Eigen::MatrixXd>& m, Index k);

/// Keeps the leading min(k, rank) triplets.
TruncatedSVD truncate(TruncatedSVD svd, Index k);

/// omega(beta) = 0.56 beta^3 - 0.95 beta^2 + 1.82 beta + 1.43, the cubic fit of
/// the optimal hard-threshold multiplier for an unknown noise level.
double threshold_coefficient(double beta);

/// Number of singular values above omega(beta) * median(s) with
/// beta = min(rows, cols) / max(rows, cols); never less than 1.
Index select_rank(std::span<const double> s, Index rows, Index cols);
Index select_rank(const Eigen::VectorXd& s, Index rows, Index cols);

/// Rank-k SVD of [A | B] given the SVD of A, without refactoring A.
/// The residual of B outside span(U) is orthonormalised by QR, the small
/// core [[diag(s), U^T B], [0, R]] is decomposed and the factors rotated.
TruncatedSVD append_columns(const TruncatedSVD& svd, const Eigen::Ref<const Eigen::MatrixXd>& B, Index k);

/// max |Q^T Q - I|.
double orthogonality_error(const Eigen::Ref<const Eigen::MatrixXd>& Q);

/// Restores orthonormal U and V while keeping U diag(s) V^T unchanged.
void reorthogonalize(TruncatedSVD& svd);

void canonicalize_signs(TruncatedSVD& svd);

/// Orthogonality drift that triggers reorthogonalize() after an update.
inline constexpr double kReorthogonalizeTolerance = 1e-8;

}  // namespace pagets
