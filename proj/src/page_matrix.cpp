#include "pagets/page_matrix.hpp"

#include "pagets/error.hpp"

#include <cmath>

namespace pagets {

bool valid_rows(Index L, Index num_series, Index length) {
  if (L < 1 || num_series < 1) return false;
  const Index P = length / L;
  return P >= 1 && L <= num_series * P;
}

Index default_rows(Index num_series, Index length) {
  if (length < 2 || num_series < 1) return 0;
  Index L = static_cast<Index>(std::floor(std::sqrt(static_cast<double>(num_series) *
                                                    static_cast<double>(length) / 10.0)));
  L = std::max<Index>(L, 2);
  L = std::min(L, length);
  while (L > 2 && !valid_rows(L, num_series, length)) --L;
  return valid_rows(L, num_series, length) ? L : 0;
}

StackedPageMatrix build_stacked_page(const Eigen::Ref<const Eigen::MatrixXd>& values,
                                     const Eigen::Ref<const BoolMatrix>& observed, Index L, bool square) {
  const Index N = values.rows();
  const Index T = values.cols();
  if (N < 1 || T < 1) throw Error(ErrorCode::InvalidParams, "empty input to page matrix");
  if (L < 1) throw Error(ErrorCode::InvalidL, "L must be >= 1");
  const Index P = T / L;
  if (P < 1 || L > N * P)
    throw Error(ErrorCode::InvalidL, "L=" + std::to_string(L) + " exceeds the column count " +
                                         std::to_string(N * P));
  StackedPageMatrix m;
  m.L = L;
  m.P = P;
  m.N = N;
  m.data = Eigen::MatrixXd::Zero(L, N * P);
  m.filled = BoolMatrix::Constant(L, N * P, false);
  for (Index n = 0; n < N; ++n) {
    for (Index j = 0; j < P; ++j) {
      const Index col = j + P * n;
      for (Index i = 0; i < L; ++i) {
        const Index t = i + j * L;
        if (!observed(n, t)) continue;
        const double x = values(n, t);
        m.data(i, col) = square ? x * x : x;
        m.filled(i, col) = true;
      }
    }
  }
  return m;
}

StackedPageMatrix build_stacked_page(const TimeSeriesBatch& batch, Index L, bool square) {
  return build_stacked_page(batch.values, batch.observed, L, square);
}

PageCoords coords_of(Index t, Index n, Index L, Index P, Index N) {
  if (L < 1 || P < 1 || t < 0 || t >= L * P || n < 0 || n >= N)
    throw Error(ErrorCode::OutOfRange, "(t=" + std::to_string(t) + ", n=" + std::to_string(n) +
                                           ") is outside the " + std::to_string(L) + "x" +
                                           std::to_string(N * P) + " layout");
  return {t % L, t / L + P * n};
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> drop_last_row(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (m.rows() < 2) throw Error(ErrorCode::TooFewRows, "need at least two rows to split off the last");
  return {m.topRows(m.rows() - 1), m.row(m.rows() - 1).transpose()};
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> drop_last_row(const StackedPageMatrix& m) {
  return drop_last_row(m.data);
}

}  // namespace pagets
