#include "pagets/incremental_model.hpp"

#include "pagets/error.hpp"
#include "pagets/estimator.hpp"
#include "pagets/page_matrix.hpp"

#include <algorithm>
#include <cmath>

namespace pagets {

namespace {

// floor() that does not lose an exact integer to pow/log roundoff.
std::int64_t stable_floor(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::floor(v));
}

bool crosses(const std::vector<std::int64_t>& points, std::int64_t prev, std::int64_t now) {
  auto it = std::upper_bound(points.begin(), points.end(), prev);
  return it != points.end() && *it <= now;
}

void fit_factor(FactorModel& fm, const StackedPageMatrix& page, std::optional<Index> k_override) {
  TruncatedSVD full = thin_svd(page.data);
  const Index max_rank = std::min(page.rows(), page.cols());
  fm.rank = k_override ? std::min(*k_override, max_rank) : select_rank(full.s, page.rows(), page.cols());
  fm.full = truncate(std::move(full), fm.rank);

  auto [tilde, last] = drop_last_row(page);
  TruncatedSVD tfull = thin_svd(tilde);
  const Index tmax = std::min(tilde.rows(), tilde.cols());
  fm.tilde_rank = k_override ? std::min(*k_override, tmax) : select_rank(tfull.s, tilde.rows(), tilde.cols());
  fm.tilde = truncate(std::move(tfull), fm.tilde_rank);
  fm.last_row = std::move(last);
  fm.beta = pcr_coefficients(fm.tilde, fm.last_row, &fm.degenerate);
}

void update_factor(FactorModel& fm, const Eigen::MatrixXd& block) {
  const Index L = block.rows();
  fm.full = append_columns(fm.full, block, fm.rank);
  fm.tilde = append_columns(fm.tilde, block.topRows(L - 1), fm.tilde_rank);
  const Index old = fm.last_row.size();
  fm.last_row.conservativeResize(old + block.cols());
  fm.last_row.tail(block.cols()) = block.row(L - 1).transpose();
  fm.beta = pcr_coefficients(fm.tilde, fm.last_row, &fm.degenerate);
}

}  // namespace

void HyperParams::validate() const {
  if (T0 < 1) throw Error(ErrorCode::InvalidParams, "T0 must be >= 1");
  if (Tprime < 2 * T0) throw Error(ErrorCode::InvalidParams, "Tprime must be >= 2*T0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorCode::InvalidParams, "gamma must lie in (0, 1]");
  if (L && *L < 2) throw Error(ErrorCode::InvalidParams, "L must be >= 2");
  if (k1 && *k1 < 1) throw Error(ErrorCode::InvalidParams, "k1 must be >= 1");
  if (k2 && *k2 < 1) throw Error(ErrorCode::InvalidParams, "k2 must be >= 1");
  if (coeff_window < 1) throw Error(ErrorCode::InvalidParams, "coefficient window must be >= 1");
}

std::int64_t initial_retrain_limit(const HyperParams& hp) {
  return stable_floor(std::log(static_cast<double>(hp.Tprime) / static_cast<double>(hp.T0)) /
                      std::log1p(hp.gamma));
}

std::int64_t segment_retrain_limit(const HyperParams& hp) {
  return stable_floor(std::log(2.0) / std::log1p(hp.gamma));
}

std::vector<std::int64_t> retrain_points(std::int64_t base, std::int64_t limit, double gamma) {
  std::vector<std::int64_t> points;
  for (std::int64_t l = 0; l <= limit; ++l)
    points.push_back(stable_floor(static_cast<double>(base) * std::pow(1.0 + gamma, static_cast<double>(l))));
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

Index submodel_index(std::int64_t observations, std::int64_t Tprime) {
  if (Tprime < 1) throw Error(ErrorCode::InvalidParams, "Tprime must be positive");
  return static_cast<Index>(std::max<std::int64_t>(0, (2 * observations) / Tprime - 1));
}

RetrainAction retrain_decision(std::int64_t observations, std::int64_t segment_start, const HyperParams& hp,
                               std::int64_t step_obs) {
  if (observations < hp.T0) return RetrainAction::Fallback;
  const std::int64_t count = observations - segment_start;
  const std::int64_t prev = count - step_obs;
  std::vector<std::int64_t> points;
  if (segment_start == 0) {
    points = retrain_points(hp.T0, initial_retrain_limit(hp), hp.gamma);
  } else {
    const std::int64_t half = std::max<std::int64_t>(1, hp.Tprime / (2 * step_obs)) * step_obs;
    points = retrain_points(half, segment_retrain_limit(hp), hp.gamma);
  }
  return crosses(points, prev, count) ? RetrainAction::FullRetrain : RetrainAction::IncrementalUpdate;
}

Index SubModel::column_of(Index n, Index j) const {
  if (j < P0) return n * P0 + j;
  return N * P0 + (j - P0) * N + n;
}

PredictionModel::PredictionModel(std::vector<std::string> names, HyperParams hp)
    : names_(std::move(names)), hp_(std::move(hp)) {
  if (names_.empty()) throw Error(ErrorCode::InvalidParams, "model needs at least one series");
  hp_.validate();
  const Index N = num_series();
  sum_ = Eigen::VectorXd::Zero(N);
  sumsq_ = Eigen::VectorXd::Zero(N);
  count_ = Eigen::VectorXd::Zero(N);
  rebuild_schedule();
}

void PredictionModel::rebuild_schedule() {
  const std::int64_t N = num_series();
  initial_points_ = retrain_points(hp_.T0, initial_retrain_limit(hp_), hp_.gamma);
  segment_points_ = retrain_points(static_cast<std::int64_t>(half_span()) * N, segment_retrain_limit(hp_), hp_.gamma);
}

Index PredictionModel::half_span() const {
  const std::int64_t N = std::max<std::int64_t>(1, num_series());
  return static_cast<Index>(std::max<std::int64_t>(1, hp_.Tprime / (2 * N)));
}

const std::vector<std::int64_t>& PredictionModel::points_for(const SubModel& sm) const {
  return sm.index == 0 ? initial_points_ : segment_points_;
}

void PredictionModel::set_time_axis(std::int64_t origin, std::int64_t step) {
  if (step < 1) throw Error(ErrorCode::InvalidParams, "time step must be positive");
  time_origin_ = origin;
  time_step_ = step;
}

bool PredictionModel::trained() const {
  return std::any_of(submodels_.begin(), submodels_.end(), [](const SubModel& s) { return s.trained; });
}

Index PredictionModel::trained_count() const {
  return std::count_if(submodels_.begin(), submodels_.end(), [](const SubModel& s) { return s.trained; });
}

std::optional<double> PredictionModel::fallback_mean(Index n) const {
  if (count_(n) > 0) return sum_(n) / count_(n);
  const double total = count_.sum();
  if (total > 0) return sum_.sum() / total;
  return std::nullopt;
}

double PredictionModel::fallback_variance(Index n) const {
  if (count_(n) < 1) return 0.0;
  const double m = sum_(n) / count_(n);
  return std::max(0.0, sumsq_(n) / count_(n) - m * m);
}

std::optional<double> PredictionModel::raw_value(Index n, Index t) const {
  if (n < 0 || n >= num_series() || t < raw_offset_ || t >= length_) return std::nullopt;
  const double v = raw_[static_cast<std::size_t>((t - raw_offset_) * num_series() + n)];
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

void PredictionModel::insert(std::span<const double> row) {
  const Index N = num_series();
  if (static_cast<Index>(row.size()) != N)
    throw Error(ErrorCode::WidthMismatch,
                "row has " + std::to_string(row.size()) + " values, model has " + std::to_string(N) + " series");
  const Index tau = length_;
  for (Index n = 0; n < N; ++n) {
    const double v = row[static_cast<std::size_t>(n)];
    if (std::isfinite(v)) {
      raw_.push_back(v);
      sum_(n) += v;
      sumsq_(n) += v * v;
      count_(n) += 1.0;
    } else {
      raw_.push_back(kMissing);
    }
  }
  ++length_;
  ++revision_;

  open_segments(tau);
  const Index newest = tau / half_span();
  bool changed = false;
  for (Index i = std::max<Index>(0, newest - 1); i <= newest; ++i) {
    SubModel& sm = submodels_[static_cast<std::size_t>(i)];
    const auto before = sm.P;
    const bool was_trained = sm.trained;
    const auto events = events_.size();
    advance_segment(sm, tau);
    changed |= sm.P != before || sm.trained != was_trained || events_.size() != events;
  }
  if (changed) refresh_coefficients();
  compact_raw();
}

void PredictionModel::insert(const TimeSeriesBatch& batch) {
  batch.validate();
  if (batch.num_series() != num_series())
    throw Error(ErrorCode::WidthMismatch, "batch has " + std::to_string(batch.num_series()) +
                                              " series, model has " + std::to_string(num_series()));
  raw_.reserve(raw_.size() + static_cast<std::size_t>(batch.values.size()));
  for (Index j = 0; j < batch.length(); ++j)
    insert(std::span<const double>(batch.values.col(j).data(), static_cast<std::size_t>(num_series())));
}

void PredictionModel::open_segments(Index tau) {
  const Index H = half_span();
  while (static_cast<Index>(submodels_.size()) <= tau / H) {
    SubModel sm;
    sm.index = static_cast<Index>(submodels_.size());
    sm.start = sm.index * H;
    sm.N = num_series();
    submodels_.push_back(std::move(sm));
  }
}

void PredictionModel::advance_segment(SubModel& sm, Index tau) {
  const Index steps = tau - sm.start + 1;
  const std::int64_t prev = sm.obs_count;
  sm.obs_count = static_cast<std::int64_t>(num_series()) * steps;

  if (sm.pending_retrain || crosses(points_for(sm), prev, sm.obs_count)) {
    sm.pending_retrain = !full_retrain(sm, tau);
    return;
  }
  if (!sm.trained) return;
  while (steps - sm.L * sm.P >= sm.L) append_column(sm);
}

bool PredictionModel::full_retrain(SubModel& sm, Index tau) {
  const Index N = num_series();
  const Index steps = tau - sm.start + 1;
  const Index L = hp_.L ? *hp_.L : default_rows(N, steps);
  if (L < 2 || !valid_rows(L, N, steps)) return false;

  const Eigen::Map<const Eigen::MatrixXd> X(raw_.data() + (sm.start - raw_offset_) * N, N, steps);
  const BoolMatrix observed = X.array().isFinite();
  const StackedPageMatrix first = build_stacked_page(X, observed, L, false);
  const StackedPageMatrix second = build_stacked_page(X, observed, L, true);
  fit_factor(sm.mean, first, hp_.k1);
  fit_factor(sm.var, second, hp_.k2);
  sm.L = L;
  sm.P0 = sm.P = first.P;
  sm.trained = true;

  events_.push_back({sm.index, observations(), sm.obs_count, L, sm.mean.rank, sm.var.rank});
  // Complete columns beyond the batch fit cannot exist: P = floor(steps / L).
  return true;
}

void PredictionModel::append_column(SubModel& sm) {
  const Index N = num_series();
  const Index L = sm.L;
  const Index first = sm.start + sm.P * L;
  Eigen::MatrixXd block(L, N);
  for (Index n = 0; n < N; ++n) {
    for (Index i = 0; i < L; ++i) {
      const double v = raw_[static_cast<std::size_t>((first + i - raw_offset_) * N + n)];
      block(i, n) = std::isfinite(v) ? v : 0.0;
    }
  }
  update_factor(sm.mean, block);
  update_factor(sm.var, block.array().square().matrix());
  sm.P += 1;
}

Eigen::VectorXd average_aligned(const std::vector<const Eigen::VectorXd*>& vectors) {
  Index width = 0;
  for (const auto* v : vectors) width = std::max(width, v->size());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(width);
  if (vectors.empty()) return acc;
  for (const auto* v : vectors) acc.tail(v->size()) += *v;
  return acc / static_cast<double>(vectors.size());
}

CoefficientAverage PredictionModel::coefficient_average(Index window) const {
  if (window < 1) throw Error(ErrorCode::InvalidParams, "coefficient window must be >= 1");
  std::vector<const Eigen::VectorXd*> means;
  std::vector<const Eigen::VectorXd*> vars;
  for (auto it = submodels_.rbegin(); it != submodels_.rend() && static_cast<Index>(means.size()) < window; ++it) {
    if (!it->trained) continue;
    means.push_back(&it->mean.beta);
    vars.push_back(&it->var.beta);
  }
  CoefficientAverage out;
  out.models = static_cast<Index>(means.size());
  out.mean = average_aligned(means);
  out.var = average_aligned(vars);
  return out;
}

void PredictionModel::refresh_coefficients() { coeff_cache_ = coefficient_average(hp_.coeff_window); }

void PredictionModel::compact_raw() {
  const Index H = half_span();
  const Index oldest_open = std::max<Index>(0, length_ / H - 1) * H;
  Index widest = hp_.L.value_or(0);
  for (const auto& sm : submodels_) widest = std::max(widest, sm.L);
  const Index keep_from = std::max<Index>(0, std::min(oldest_open, length_ - widest));
  const Index drop = keep_from - raw_offset_;
  const Index retained = length_ - raw_offset_;
  if (drop < 1024 || 2 * drop < retained) return;
  const auto N = static_cast<std::size_t>(num_series());
  raw_.erase(raw_.begin(), raw_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(drop) * N));
  raw_offset_ = keep_from;
}

PredictionModel create_model(const TimeSeriesBatch& batch, const HyperParams& hp) {
  batch.validate();
  PredictionModel model(batch.names, hp);
  model.set_time_axis(batch.t0, batch.step);
  model.insert(batch);
  return model;
}

}  // namespace pagets
