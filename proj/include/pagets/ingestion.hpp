#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace pagets {

using Index = Eigen::Index;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Missing-value sentinel. The `observed` mask, not the sentinel, is the
/// source of truth for every algorithm.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// One parsed CSV cell before it is placed on the grid.
struct RawRecord {
  std::int64_t timestamp = 0;
  std::string series_id;
  std::optional<double> value;
};

/// N aligned series of T observations. Series are rows, time steps are
/// columns, so appending a time step appends a column.
struct TimeSeriesBatch {
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // N x T, kMissing where unobserved
  BoolMatrix observed;     // N x T
  std::int64_t t0 = 0;     // timestamp of column 0
  std::int64_t step = 1;   // timestamp spacing between columns
  /// Per-column timestamps when the grid is irregular (e.g. straight out of
  /// a CSV). Empty means the regular grid t0 + j * step.
  std::vector<std::int64_t> timestamps;

  Index num_series() const { return values.rows(); }
  Index length() const { return values.cols(); }
  std::int64_t timestamp_of(Index column) const;

  /// Builds a batch from a value grid; NaN cells become unobserved.
  static TimeSeriesBatch from_values(Eigen::MatrixXd values, std::vector<std::string> names = {});

  /// Throws RaggedInput/InvalidParams when the invariants do not hold.
  void validate() const;
};

/// Reads an RFC-4180 style CSV with a header row. Empty cells are missing.
/// Time values may be integer epochs or ISO-8601 instants (converted to epoch
/// seconds). When `value_cols` is empty every non-time column is loaded.
TimeSeriesBatch load_csv(const std::filesystem::path& path, const std::string& time_col,
                         const std::vector<std::string>& value_cols = {});

/// Same as load_csv but parses from an in-memory string.
TimeSeriesBatch parse_csv(const std::string& text, const std::string& time_col,
                          const std::vector<std::string>& value_cols = {});

/// Writes `batch` as CSV with a leading time column; missing cells are empty.
/// Values are written with 17 significant digits so they parse back exactly.
void write_csv(const TimeSeriesBatch& batch, const std::filesystem::path& path,
               const std::string& time_col = "t");
std::string format_csv(const TimeSeriesBatch& batch, const std::string& time_col = "t");

enum class AggregateFn { Mean, Min, Max, Sum, Last };

std::optional<AggregateFn> parse_aggregate_fn(const std::string& name);

/// Buckets columns by floor((ts - ts_first) / interval) and reduces the
/// observed entries of each bucket with `fn`. Buckets with no observed entry
/// stay missing. The result is always on a regular grid.
TimeSeriesBatch aggregate(const TimeSeriesBatch& batch, std::int64_t interval, AggregateFn fn);

}  // namespace pagets
