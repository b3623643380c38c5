#pragma once

#include "pagets/incremental_model.hpp"

#include <memory>
#include <mutex>
#include <span>

namespace pagets {

/// Single writer, many readers. Readers hold an immutable snapshot that stays
/// valid while the writer keeps inserting into its private working copy.
class ModelHandle {
 public:
  explicit ModelHandle(PredictionModel model);

  std::shared_ptr<const PredictionModel> snapshot() const;

  /// Writer side. Inserts are invisible to readers until publish().
  void insert(std::span<const double> row);
  void insert(const TimeSeriesBatch& batch);
  void publish();

  const PredictionModel& working() const { return working_; }

 private:
  PredictionModel working_;
  mutable std::mutex mu_;
  std::shared_ptr<const PredictionModel> published_;
};

}  // namespace pagets
