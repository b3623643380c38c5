#include "pagets/metrics.hpp"

#include "pagets/error.hpp"

#include <cmath>

namespace pagets {

namespace {

struct Moments {
  double mean;
  double sd;
};

Moments truth_moments(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size())
    throw Error(ErrorCode::LengthMismatch, "prediction and truth lengths differ");
  if (truth.size() < 2) throw Error(ErrorCode::LengthMismatch, "need at least two points");
  double mean = 0.0;
  for (double v : truth) mean += v;
  mean /= static_cast<double>(truth.size());
  double ss = 0.0;
  for (double v : truth) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(truth.size()));
  if (!(sd > 0.0)) throw Error(ErrorCode::DegenerateTruth, "truth has zero variance");
  return {mean, sd};
}

}  // namespace

double nrmse(std::span<const double> pred, std::span<const double> truth) {
  const Moments m = truth_moments(pred, truth);
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = (pred[i] - truth[i]) / m.sd;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(truth.size()));
}

double pooled_nrmse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
    throw Error(ErrorCode::LengthMismatch, "prediction and truth shapes differ");
  if (truth.rows() < 1) throw Error(ErrorCode::LengthMismatch, "no series");
  double acc = 0.0;
  std::vector<double> p(static_cast<std::size_t>(truth.cols())), q(p.size());
  for (Index n = 0; n < truth.rows(); ++n) {
    for (Index t = 0; t < truth.cols(); ++t) {
      p[static_cast<std::size_t>(t)] = pred(n, t);
      q[static_cast<std::size_t>(t)] = truth(n, t);
    }
    const double e = nrmse(p, q);
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(truth.rows()));
}

double r_squared(std::span<const double> pred, std::span<const double> truth) {
  const Moments m = truth_moments(pred, truth);
  double res = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) res += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  const double tot = m.sd * m.sd * static_cast<double>(truth.size());
  return 1.0 - res / tot;
}

void ExperimentGrid::validate() const {
  if (errors.rows() != static_cast<Index>(algorithms.size()) || errors.cols() != static_cast<Index>(experiments.size()))
    throw Error(ErrorCode::IncompleteGrid, "error table shape does not match the algorithm/experiment lists");
  if (algorithms.size() < 2) throw Error(ErrorCode::IncompleteGrid, "need at least two algorithms");
  if (experiments.empty()) throw Error(ErrorCode::IncompleteGrid, "need at least one experiment");
  for (Index a = 0; a < errors.rows(); ++a)
    for (Index x = 0; x < errors.cols(); ++x)
      if (!std::isfinite(errors(a, x)) || errors(a, x) < 0.0)
        throw Error(ErrorCode::IncompleteGrid,
                    "missing or invalid error for " + algorithms[static_cast<std::size_t>(a)] + " on " +
                        experiments[static_cast<std::size_t>(x)]);
}

Eigen::VectorXd wbc(const ExperimentGrid& grid) {
  grid.validate();
  const Index A = grid.errors.rows();
  const Index X = grid.errors.cols();
  Eigen::VectorXd score = Eigen::VectorXd::Zero(A);
  for (Index a = 0; a < A; ++a) {
    double acc = 0.0;
    for (Index b = 0; b < A; ++b) {
      if (b == a) continue;
      double pair = 0.0;
      for (Index x = 0; x < X; ++x) {
        const double ea = grid.errors(a, x);
        const double eb = grid.errors(b, x);
        pair += (ea + eb == 0.0) ? 0.5 : eb / (ea + eb);
      }
      acc += pair / static_cast<double>(X);
    }
    score(a) = acc / static_cast<double>(A - 1);
  }
  return score;
}

}  // namespace pagets
