#include "pagets/snapshot.hpp"

namespace pagets {

ModelHandle::ModelHandle(PredictionModel model)
    : working_(std::move(model)), published_(std::make_shared<const PredictionModel>(working_)) {}

std::shared_ptr<const PredictionModel> ModelHandle::snapshot() const {
  std::lock_guard lock(mu_);
  return published_;
}

void ModelHandle::insert(std::span<const double> row) { working_.insert(row); }

void ModelHandle::insert(const TimeSeriesBatch& batch) { working_.insert(batch); }

void ModelHandle::publish() {
  auto next = std::make_shared<const PredictionModel>(working_);
  std::lock_guard lock(mu_);
  published_ = std::move(next);
}

}  // namespace pagets
