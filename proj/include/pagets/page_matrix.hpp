#pragma once

#include "pagets/ingestion.hpp"

#include <utility>

namespace pagets {

/// Column-wise concatenation of the N per-series Page matrices. Column
/// j + P*n holds observations [j*L, (j+1)*L) of series n (all indices 0-based).
struct StackedPageMatrix {
  Eigen::MatrixXd data;  // L x (N*P), zero where unobserved
  BoolMatrix filled;     // L x (N*P)
  Index L = 0;
  Index P = 0;
  Index N = 0;

  Index rows() const { return L; }
  Index cols() const { return N * P; }
};

/// Builds the stacked Page matrix over the first L*floor(T/L) steps of every
/// series; trailing steps are left for the caller. With `square` the observed
/// entries are squared.
StackedPageMatrix build_stacked_page(const TimeSeriesBatch& batch, Index L, bool square);

/// Same, from a raw N x T grid and its mask (used on model segments).
StackedPageMatrix build_stacked_page(const Eigen::Ref<const Eigen::MatrixXd>& values,
                                     const Eigen::Ref<const BoolMatrix>& observed, Index L, bool square);

struct PageCoords {
  Index row = 0;
  Index col = 0;
  bool operator==(const PageCoords&) const = default;
};

/// Maps series n and time t (both 0-based, t relative to the segment start)
/// onto the stacked matrix.
PageCoords coords_of(Index t, Index n, Index L, Index P, Index N);

/// Splits off the last row: returns (rows 0..L-2, row L-1).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> drop_last_row(const StackedPageMatrix& m);
std::pair<Eigen::MatrixXd, Eigen::VectorXd> drop_last_row(const Eigen::Ref<const Eigen::MatrixXd>& m);

/// Default number of rows for N series of `length` steps: floor(sqrt(N*length/10)),
/// then lowered until L <= N*floor(length/L) and clamped to >= 2. Returns 0 when
/// no valid L >= 2 exists (length < 2).
Index default_rows(Index num_series, Index length);

/// True when an L-row stacked Page matrix can be formed from `length` steps.
bool valid_rows(Index L, Index num_series, Index length);

}  // namespace pagets
