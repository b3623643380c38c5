#include "pagets/ingestion.hpp"

#include "pagets/error.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

namespace pagets {

namespace {

std::vector<std::vector<std::string>> parse_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    if (row_has_content || row.size() > 1 || !row.front().empty()) rows.push_back(std::move(row));
    row.clear();
    row_has_content = false;
  };

  std::size_t i = 0;
  // Skip a UTF-8 byte order mark.
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        end_field();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        row_has_content = true;
    }
  }
  if (!field.empty() || !row.empty() || row_has_content) end_row();
  return rows;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// YYYY-MM-DD[(T| )HH:MM[:SS[.fff]]][Z|+hh:mm|-hh:mm] -> epoch seconds.
std::optional<std::int64_t> parse_iso8601(std::string_view s) {
  auto digits = [&](std::size_t pos, std::size_t n, int& out) {
    if (pos + n > s.size()) return false;
    return parse_number(s.substr(pos, n), out);
  };
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!digits(0, 4, year) || !digits(5, 2, month) || !digits(8, 2, day)) return std::nullopt;
  std::size_t pos = 10;
  if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
    if (!digits(pos + 1, 2, hour) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
        !digits(pos + 4, 2, minute))
      return std::nullopt;
    pos += 6;
    if (pos < s.size() && s[pos] == ':') {
      if (!digits(pos + 1, 2, second)) return std::nullopt;
      pos += 3;
      if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      }
    }
  }
  std::int64_t offset = 0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      pos += 1;
    } else if ((s[pos] == '+' || s[pos] == '-') && pos + 6 == s.size() && s[pos + 3] == ':') {
      int oh = 0, om = 0;
      if (!digits(pos + 1, 2, oh) || !digits(pos + 4, 2, om)) return std::nullopt;
      offset = (s[pos] == '+' ? 1 : -1) * (oh * 3600 + om * 60);
      pos = s.size();
    } else {
      return std::nullopt;
    }
  }
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + hour * 3600 + minute * 60 + second - offset;
}

std::int64_t parse_timestamp(const std::string& raw, std::size_t line) {
  const std::string s = trim(raw);
  std::int64_t epoch = 0;
  if (!s.empty() && parse_number(std::string_view(s), epoch)) return epoch;
  if (auto iso = parse_iso8601(s)) return *iso;
  throw Error(ErrorCode::UnparseableTimestamp,
              "line " + std::to_string(line) + ": cannot parse time value '" + s + "'");
}

}  // namespace

std::int64_t TimeSeriesBatch::timestamp_of(Index column) const {
  if (!timestamps.empty()) return timestamps[static_cast<std::size_t>(column)];
  return t0 + column * step;
}

TimeSeriesBatch TimeSeriesBatch::from_values(Eigen::MatrixXd values, std::vector<std::string> names) {
  TimeSeriesBatch batch;
  if (names.empty()) {
    for (Index n = 0; n < values.rows(); ++n) names.push_back("s" + std::to_string(n));
  }
  batch.names = std::move(names);
  batch.observed = values.array().isFinite();
  for (Index j = 0; j < values.cols(); ++j)
    for (Index n = 0; n < values.rows(); ++n)
      if (!batch.observed(n, j)) values(n, j) = kMissing;
  batch.values = std::move(values);
  batch.validate();
  return batch;
}

void TimeSeriesBatch::validate() const {
  if (values.rows() < 1 || values.cols() < 1)
    throw Error(ErrorCode::InvalidParams, "batch needs at least one series and one time step");
  if (static_cast<Index>(names.size()) != values.rows())
    throw Error(ErrorCode::RaggedInput, "series name count does not match the value grid");
  if (observed.rows() != values.rows() || observed.cols() != values.cols())
    throw Error(ErrorCode::RaggedInput, "observed mask shape does not match the value grid");
  if (!timestamps.empty() && static_cast<Index>(timestamps.size()) != values.cols())
    throw Error(ErrorCode::RaggedInput, "timestamp count does not match the value grid");
  if (step < 1) throw Error(ErrorCode::InvalidParams, "step must be positive");
  for (Index j = 0; j < values.cols(); ++j)
    for (Index n = 0; n < values.rows(); ++n)
      if (observed(n, j) != std::isfinite(values(n, j)))
        throw Error(ErrorCode::InvalidParams, "observed mask disagrees with finite values");
}

TimeSeriesBatch parse_csv(const std::string& text, const std::string& time_col,
                          const std::vector<std::string>& value_cols) {
  auto rows = parse_rows(text);
  if (rows.empty()) throw Error(ErrorCode::EmptyFile, "no header row");
  const auto& header = rows.front();
  auto find_col = [&](const std::string& name) -> std::size_t {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (trim(header[c]) == name) return c;
    throw Error(ErrorCode::MissingColumn, "column '" + name + "' not in header");
  };
  const std::size_t time_idx = find_col(time_col);
  std::vector<std::string> names = value_cols;
  if (names.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (c != time_idx) names.push_back(trim(header[c]));
  }
  if (names.empty()) throw Error(ErrorCode::MissingColumn, "no value columns");
  std::vector<std::size_t> idx;
  for (const auto& n : names) idx.push_back(find_col(n));
  if (rows.size() < 2) throw Error(ErrorCode::EmptyFile, "no data rows");

  struct Row {
    std::int64_t ts;
    std::size_t line;
  };
  std::vector<Row> order;
  order.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    if (time_idx >= cells.size())
      throw Error(ErrorCode::UnparseableTimestamp, "line " + std::to_string(r + 1) + ": no time value");
    order.push_back({parse_timestamp(cells[time_idx], r + 1), r});
  }
  std::stable_sort(order.begin(), order.end(), [](const Row& a, const Row& b) { return a.ts < b.ts; });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (order[i].ts == order[i - 1].ts)
      throw Error(ErrorCode::DuplicateTimestamp, "timestamp " + std::to_string(order[i].ts) +
                                                     " appears more than once");

  const Index N = static_cast<Index>(names.size());
  const Index T = static_cast<Index>(order.size());
  Eigen::MatrixXd values = Eigen::MatrixXd::Constant(N, T, kMissing);
  std::vector<std::int64_t> stamps(static_cast<std::size_t>(T));
  for (Index j = 0; j < T; ++j) {
    const auto& row = order[static_cast<std::size_t>(j)];
    stamps[static_cast<std::size_t>(j)] = row.ts;
    const auto& cells = rows[row.line];
    for (Index n = 0; n < N; ++n) {
      const std::size_t c = idx[static_cast<std::size_t>(n)];
      if (c >= cells.size()) continue;
      const std::string cell = trim(cells[c]);
      if (cell.empty()) continue;
      double v = 0.0;
      if (!parse_number(std::string_view(cell), v))
        throw Error(ErrorCode::InvalidParams, "line " + std::to_string(row.line + 1) +
                                                  ": cannot parse value '" + cell + "'");
      values(n, j) = v;
    }
  }
  TimeSeriesBatch batch = TimeSeriesBatch::from_values(std::move(values), std::move(names));
  batch.t0 = stamps.front();
  bool regular = T >= 2;
  const std::int64_t step = T >= 2 ? stamps[1] - stamps[0] : 1;
  for (std::size_t j = 1; regular && j < stamps.size(); ++j) regular = stamps[j] - stamps[j - 1] == step;
  if (T == 1 || regular) {
    batch.step = T >= 2 ? step : 1;
  } else {
    batch.timestamps = std::move(stamps);
  }
  return batch;
}

TimeSeriesBatch load_csv(const std::filesystem::path& path, const std::string& time_col,
                         const std::vector<std::string>& value_cols) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), time_col, value_cols);
}

std::string format_csv(const TimeSeriesBatch& batch, const std::string& time_col) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += "\"\"";
      else out.push_back(c);
    }
    return out + "\"";
  };
  std::ostringstream os;
  os << std::setprecision(17);
  os << quote(time_col);
  for (const auto& n : batch.names) os << ',' << quote(n);
  os << '\n';
  for (Index j = 0; j < batch.length(); ++j) {
    os << batch.timestamp_of(j);
    for (Index n = 0; n < batch.num_series(); ++n) {
      os << ',';
      if (batch.observed(n, j)) os << batch.values(n, j);
    }
    os << '\n';
  }
  return os.str();
}

void write_csv(const TimeSeriesBatch& batch, const std::filesystem::path& path, const std::string& time_col) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << format_csv(batch, time_col);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::optional<AggregateFn> parse_aggregate_fn(const std::string& name) {
  static const std::map<std::string, AggregateFn> table{{"mean", AggregateFn::Mean},
                                                        {"min", AggregateFn::Min},
                                                        {"max", AggregateFn::Max},
                                                        {"sum", AggregateFn::Sum},
                                                        {"last", AggregateFn::Last}};
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

TimeSeriesBatch aggregate(const TimeSeriesBatch& batch, std::int64_t interval, AggregateFn fn) {
  if (interval < 1) throw Error(ErrorCode::InvalidInterval, "interval must be >= 1");
  batch.validate();
  const Index N = batch.num_series();
  const Index T = batch.length();
  // Bucket keys are measured in grid ticks for regular batches and in
  // timestamp units for irregular ones.
  auto tick_of = [&](Index j) -> std::int64_t {
    if (batch.timestamps.empty()) return j;
    return batch.timestamps[static_cast<std::size_t>(j)] - batch.timestamps.front();
  };
  const Index buckets = static_cast<Index>(tick_of(T - 1) / interval) + 1;

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(N, buckets);
  Eigen::MatrixXi count = Eigen::MatrixXi::Zero(N, buckets);
  for (Index j = 0; j < T; ++j) {
    const Index b = static_cast<Index>(tick_of(j) / interval);
    for (Index n = 0; n < N; ++n) {
      if (!batch.observed(n, j)) continue;
      const double v = batch.values(n, j);
      double& a = acc(n, b);
      int& c = count(n, b);
      switch (fn) {
        case AggregateFn::Mean:
        case AggregateFn::Sum: a += v; break;
        case AggregateFn::Min: a = c == 0 ? v : std::min(a, v); break;
        case AggregateFn::Max: a = c == 0 ? v : std::max(a, v); break;
        case AggregateFn::Last: a = v; break;
      }
      ++c;
    }
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(N, buckets, kMissing);
  for (Index b = 0; b < buckets; ++b)
    for (Index n = 0; n < N; ++n)
      if (count(n, b) > 0) out(n, b) = fn == AggregateFn::Mean ? acc(n, b) / count(n, b) : acc(n, b);

  TimeSeriesBatch result = TimeSeriesBatch::from_values(std::move(out), batch.names);
  result.t0 = batch.timestamp_of(0);
  result.step = batch.timestamps.empty() ? batch.step * interval : interval;
  return result;
}

}  // namespace pagets
