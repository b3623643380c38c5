#include "pagets/svd.hpp"

#include "pagets/error.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace pagets {

namespace {

TruncatedSVD decompose(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  TruncatedSVD out;
  if (m.rows() == 0 || m.cols() == 0) {
    out.U.resize(m.rows(), 0);
    out.V.resize(m.cols(), 0);
    return out;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.U = svd.matrixU();
  out.s = svd.singularValues();
  out.V = svd.matrixV();
  return out;
}

}  // namespace

Eigen::MatrixXd TruncatedSVD::reconstruct() const {
  return U * s.asDiagonal() * V.transpose();
}

double TruncatedSVD::entry(Index row, Index col) const {
  double acc = 0.0;
  for (Index k = 0; k < s.size(); ++k) acc += U(row, k) * V(col, k) * s(k);
  return acc;
}

void canonicalize_signs(TruncatedSVD& svd) {
  for (Index j = 0; j < svd.rank(); ++j) {
    Index arg = 0;
    svd.U.col(j).cwiseAbs().maxCoeff(&arg);
    if (svd.U(arg, j) < 0.0) {
      svd.U.col(j) *= -1.0;
      svd.V.col(j) *= -1.0;
    }
  }
}

TruncatedSVD thin_svd(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFiniteInput, "matrix contains NaN or Inf");
  TruncatedSVD out = decompose(m);
  canonicalize_signs(out);
  return out;
}

TruncatedSVD truncate(TruncatedSVD svd, Index k) {
  k = std::clamp<Index>(k, 0, svd.rank());
  svd.U.conservativeResize(Eigen::NoChange, k);
  svd.V.conservativeResize(Eigen::NoChange, k);
  svd.s.conservativeResize(k);
  return svd;
}

TruncatedSVD truncated_svd(const Eigen::Ref<const Eigen::MatrixXd>& m, Index k) {
  const Index max_rank = std::min(m.rows(), m.cols());
  if (k < 1 || k > max_rank)
    throw Error(ErrorCode::RankOutOfRange,
                "k=" + std::to_string(k) + " outside [1, " + std::to_string(max_rank) + "]");
  return truncate(thin_svd(m), k);
}

double threshold_coefficient(double beta) {
  return 0.56 * beta * beta * beta - 0.95 * beta * beta + 1.82 * beta + 1.43;
}

Index select_rank(std::span<const double> s, Index rows, Index cols) {
  if (s.empty()) throw Error(ErrorCode::EmptySpectrum, "no singular values");
  if (rows < 1 || cols < 1) throw Error(ErrorCode::InvalidParams, "matrix shape must be positive");
  std::vector<double> sorted(s.begin(), s.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  const double beta = static_cast<double>(std::min(rows, cols)) / static_cast<double>(std::max(rows, cols));
  const double tau = threshold_coefficient(beta) * median;
  const auto k = std::count_if(s.begin(), s.end(), [tau](double v) { return v > tau; });
  return std::max<Index>(1, static_cast<Index>(k));
}

Index select_rank(const Eigen::VectorXd& s, Index rows, Index cols) {
  return select_rank(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())), rows, cols);
}

double orthogonality_error(const Eigen::Ref<const Eigen::MatrixXd>& Q) {
  if (Q.cols() == 0) return 0.0;
  const Eigen::MatrixXd gram = Q.transpose() * Q;
  return (gram - Eigen::MatrixXd::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff();
}

void reorthogonalize(TruncatedSVD& svd) {
  const Index k = svd.rank();
  if (k == 0) return;
  Eigen::HouseholderQR<Eigen::MatrixXd> qu(svd.U);
  Eigen::HouseholderQR<Eigen::MatrixXd> qv(svd.V);
  const Eigen::MatrixXd Ru = qu.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd Rv = qv.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd Qu = qu.householderQ() * Eigen::MatrixXd::Identity(svd.U.rows(), k);
  const Eigen::MatrixXd Qv = qv.householderQ() * Eigen::MatrixXd::Identity(svd.V.rows(), k);
  const Eigen::MatrixXd small = Ru * svd.s.asDiagonal() * Rv.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> core(small, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.U = Qu * core.matrixU();
  svd.s = core.singularValues();
  svd.V = Qv * core.matrixV();
  canonicalize_signs(svd);
}

TruncatedSVD append_columns(const TruncatedSVD& svd, const Eigen::Ref<const Eigen::MatrixXd>& B, Index k) {
  const Index L = svd.rows();
  const Index n = svd.cols();
  const Index c = B.cols();
  if (B.rows() != L)
    throw Error(ErrorCode::ShapeMismatch, "appended block has " + std::to_string(B.rows()) +
                                              " rows, expected " + std::to_string(L));
  if (!B.allFinite()) throw Error(ErrorCode::NonFiniteInput, "appended block contains NaN or Inf");
  if (k < 1 || k > std::min(L, n + c))
    throw Error(ErrorCode::RankOutOfRange, "k=" + std::to_string(k) + " invalid for the appended shape");

  if (c == 0) return truncate(svd, k);

  const Index r0 = svd.rank();
  const Eigen::MatrixXd& U = svd.U;

  // Project onto span(U) twice; one pass loses orthogonality when B is
  // nearly inside the span.
  Eigen::MatrixXd C = U.transpose() * B;
  Eigen::MatrixXd R = B - U * C;
  const Eigen::MatrixXd C2 = U.transpose() * R;
  R.noalias() -= U * C2;
  C += C2;

  // Rank-revealing QR of the residual. Directions below roundoff of the
  // data scale carry no information and would break orthogonality of [U Q].
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(R);
  const double scale = std::max(svd.s.size() > 0 ? svd.s(0) : 0.0, B.norm());
  const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(L, c)) * scale;
  const Index diag = std::min(L, c);
  Index r = 0;
  while (r < diag && std::abs(qr.matrixQR()(r, r)) > tol) ++r;

  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(L, r);
  Eigen::MatrixXd Rhat = Eigen::MatrixXd::Zero(r, c);
  if (r > 0) {
    const Eigen::MatrixXd upper = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    Rhat = upper * qr.colsPermutation().transpose();
  }

  Eigen::MatrixXd core = Eigen::MatrixXd::Zero(r0 + r, r0 + c);
  core.topLeftCorner(r0, r0) = svd.s.asDiagonal();
  core.topRightCorner(r0, c) = C;
  core.bottomRightCorner(r, c) = Rhat;

  TruncatedSVD inner = decompose(core);
  const Index k_new = std::min({k, core.rows(), core.cols()});

  TruncatedSVD out;
  out.U = U * inner.U.topRows(r0).leftCols(k_new);
  if (r > 0) out.U.noalias() += Q * inner.U.bottomRows(r).leftCols(k_new);
  out.s = inner.s.head(k_new);
  out.V.resize(n + c, k_new);
  out.V.topRows(n) = svd.V * inner.V.topRows(r0).leftCols(k_new);
  out.V.bottomRows(c) = inner.V.bottomRows(c).leftCols(k_new);

  if (orthogonality_error(out.U) > kReorthogonalizeTolerance ||
      orthogonality_error(out.V) > kReorthogonalizeTolerance) {
    reorthogonalize(out);
  } else {
    canonicalize_signs(out);
  }
  return out;
}

}  // namespace pagets
