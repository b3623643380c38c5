#pragma once

#include "pagets/ingestion.hpp"
#include "pagets/svd.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pagets {

struct HyperParams {
  std::int64_t T0 = 100;            // observations before the first training
  std::int64_t Tprime = 2'500'000;  // observations spanned by one sub-model
  double gamma = 0.5;               // geometric retrain growth factor
  std::optional<Index> L;           // fixed Page-matrix rows; otherwise floor(sqrt(N*T_seg/10))
  std::optional<Index> k1;          // mean-model rank; otherwise data driven
  std::optional<Index> k2;          // variance-model rank; otherwise data driven
  Index coeff_window = 10;          // sub-models averaged for forecasting

  /// Throws InvalidParams unless T0 >= 1, Tprime >= 2*T0, 0 < gamma <= 1.
  void validate() const;
};

/// floor(ln(T'/T0) / ln(1+gamma)): retrains of M_0 after the first.
std::int64_t initial_retrain_limit(const HyperParams& hp);
/// floor(ln 2 / ln(1+gamma)): retrains of each later sub-model after the first.
std::int64_t segment_retrain_limit(const HyperParams& hp);
/// {floor(base * (1+gamma)^l) : 0 <= l <= limit}, deduplicated, ascending.
std::vector<std::int64_t> retrain_points(std::int64_t base, std::int64_t limit, double gamma);

/// i = max(0, floor(2 t' / T') - 1).
Index submodel_index(std::int64_t observations, std::int64_t Tprime);

enum class RetrainAction { Fallback, FullRetrain, IncrementalUpdate };

/// Decision for the sub-model starting at observation `segment_start` after
/// the stream reaches `observations`, when each step adds `step_obs`
/// observations (the series count). M_0 retrains at floor(T0 (1+gamma)^l),
/// later sub-models at segment_start + floor(half (1+gamma)^l) with half the
/// observation count of half a span.
RetrainAction retrain_decision(std::int64_t observations, std::int64_t segment_start, const HyperParams& hp,
                               std::int64_t step_obs = 1);

/// Factors of one moment (X or X^2) of a sub-model.
struct FactorModel {
  TruncatedSVD full;           // L x cols
  TruncatedSVD tilde;          // (L-1) x cols, last row dropped
  Eigen::VectorXd last_row;    // cols
  Eigen::VectorXd beta;        // L-1, oldest lag first
  Index rank = 0;              // target rank for updates of `full`
  Index tilde_rank = 0;        // target rank for updates of `tilde`
  bool degenerate = false;
};

/// One trained segment of the stream.
struct SubModel {
  Index index = 0;
  Index start = 0;       // first time step of the segment
  Index L = 0;
  Index P0 = 0;          // Page columns per series at the last full retrain
  Index P = 0;           // complete Page columns per series now
  Index N = 0;
  std::int64_t obs_count = 0;
  bool trained = false;
  bool pending_retrain = false;
  FactorModel mean;
  FactorModel var;

  /// Row of V holding Page column j of series n. Columns from the last full
  /// retrain keep the stacked layout j + P0*n; appended columns follow in
  /// blocks of N, one per series.
  Index column_of(Index n, Index j) const;
  /// Number of leading segment steps represented by complete columns.
  Index covered_steps() const { return L * P; }
  bool covers(Index t) const { return trained && t >= start && t - start < covered_steps(); }
};

struct RetrainEvent {
  Index submodel = 0;
  std::int64_t observations = 0;  // t' when the retrain ran
  std::int64_t segment_obs = 0;   // t' - s_i
  Index L = 0;
  Index k1 = 0;
  Index k2 = 0;
};

/// Averaged forecasting coefficients, right-aligned on the most recent lag.
struct CoefficientAverage {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
  Index models = 0;
};

/// Ordered sub-models plus everything needed to keep training and to answer
/// queries. Single writer; copy it to publish a snapshot.
class PredictionModel {
 public:
  PredictionModel() = default;
  PredictionModel(std::vector<std::string> names, HyperParams hp);

  /// Appends one time step (N values, NaN = missing).
  void insert(std::span<const double> row);
  /// Appends every column of `batch`; series names must match.
  void insert(const TimeSeriesBatch& batch);

  const std::vector<std::string>& names() const { return names_; }
  const HyperParams& hyper_params() const { return hp_; }
  Index num_series() const { return static_cast<Index>(names_.size()); }
  /// Time steps seen (T).
  Index length() const { return length_; }
  /// t' = N * T.
  std::int64_t observations() const { return static_cast<std::int64_t>(num_series()) * length_; }
  /// Half a sub-model span, in time steps.
  Index half_span() const;

  const std::vector<SubModel>& submodels() const { return submodels_; }
  bool trained() const;
  Index trained_count() const;
  const std::vector<RetrainEvent>& retrain_events() const { return events_; }

  /// Running statistics used while no sub-model is trained.
  std::optional<double> fallback_mean(Index n) const;
  double fallback_variance(Index n) const;

  /// Raw observation if it is still retained and observed.
  std::optional<double> raw_value(Index n, Index t) const;
  Index retained_from() const { return raw_offset_; }

  /// Averaged coefficients over the last `window` trained sub-models. The
  /// configured window is served from a cache refreshed on every coefficient
  /// change.
  CoefficientAverage coefficient_average(Index window) const;
  const CoefficientAverage& cached_coefficients() const { return coeff_cache_; }

  std::int64_t time_origin() const { return time_origin_; }
  std::int64_t time_step() const { return time_step_; }
  void set_time_axis(std::int64_t origin, std::int64_t step);

  /// Monotone counter bumped by every insert.
  std::uint64_t revision() const { return revision_; }

 private:
  friend struct ModelCodec;

  void open_segments(Index tau);
  void advance_segment(SubModel& sm, Index tau);
  bool full_retrain(SubModel& sm, Index tau);
  void append_column(SubModel& sm);
  void refresh_coefficients();
  void compact_raw();
  const std::vector<std::int64_t>& points_for(const SubModel& sm) const;

  std::vector<std::string> names_;
  HyperParams hp_;
  Index length_ = 0;
  std::vector<SubModel> submodels_;
  std::vector<RetrainEvent> events_;

  // Retained raw observations, column-major N x (length_ - raw_offset_).
  std::vector<double> raw_;
  Index raw_offset_ = 0;

  Eigen::VectorXd sum_;
  Eigen::VectorXd sumsq_;
  Eigen::VectorXd count_;

  CoefficientAverage coeff_cache_;
  std::int64_t time_origin_ = 0;
  std::int64_t time_step_ = 1;
  std::uint64_t revision_ = 0;

  // Derived from hp_ and N; rebuilt on construction and load.
  std::vector<std::int64_t> initial_points_;
  std::vector<std::int64_t> segment_points_;
  void rebuild_schedule();
};

/// Trains by replaying `batch` one time step at a time.
PredictionModel create_model(const TimeSeriesBatch& batch, const HyperParams& hp);

/// Right-aligned mean of coefficient vectors of possibly different lengths.
Eigen::VectorXd average_aligned(const std::vector<const Eigen::VectorXd*>& vectors);

}  // namespace pagets
