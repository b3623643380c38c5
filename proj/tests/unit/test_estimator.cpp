#include "helpers.hpp"
#include "pagets/estimator.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace pagets;

TEST_CASE("two-by-two rank-one imputation closed form") {
  // Page [[c, c], [0, c]] (x1 missing). Its top eigenvector of M M^T is
  // (phi, 1) / sqrt(1 + phi^2), so the rank-1 fit is u u^T M.
  const double c = 3.0;
  const double phi = std::numbers::phi;
  const TimeSeriesBatch b = TimeSeriesBatch::from_values(Eigen::RowVector4d(c, kMissing, c, c));
  const Imputation im = impute_mean(b, 2, 1);
  const double d = 1.0 + phi * phi;
  CHECK(im.estimate(0, 0) == doctest::Approx(c * phi * phi / d).epsilon(1e-12));
  CHECK(im.estimate(0, 1) == doctest::Approx(c * phi / d).epsilon(1e-12));
  CHECK(im.estimate(0, 2) == doctest::Approx(c * (phi * phi + phi) / d).epsilon(1e-12));
  CHECK(im.estimate(0, 3) == doctest::Approx(c * (phi + 1.0) / d).epsilon(1e-12));
  CHECK(im.estimate(0, 1) == doctest::Approx(0.4472136 * c).epsilon(1e-6));
  // The default rank choice lands on the same k = 1.
  const Imputation dflt = impute_mean(b, 2);
  CHECK((dflt.estimate - im.estimate).norm() < 1e-12);
}

TEST_CASE("noiseless low rank data is reproduced") {
  Eigen::MatrixXd v(3, 400);
  for (Index n = 0; n < 3; ++n)
    for (Index t = 0; t < 400; ++t)
      v(n, t) = std::sin(0.05 * static_cast<double>(t) + static_cast<double>(n)) + 0.5 * static_cast<double>(n);
  const Imputation im = impute_mean(TimeSeriesBatch::from_values(v), 20, 3);
  CHECK((im.estimate - v).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(im.covered == 400);
}

TEST_CASE("trailing remainder carries raw values") {
  const TimeSeriesBatch b = TimeSeriesBatch::from_values(Eigen::RowVectorXd::LinSpaced(10, 1, 10));
  const Imputation im = impute_mean(b, 3);
  CHECK(im.covered == 9);
  CHECK(im.estimate(0, 9) == 10.0);
  CHECK_FALSE(im.in_segment(9));
}

TEST_CASE("constant series gives equal weights") {
  const TimeSeriesBatch b = TimeSeriesBatch::from_values(Eigen::RowVectorXd::Constant(30, 2.5));
  const ForecastModel fm = fit_forecaster(b, 3);
  REQUIRE(fm.beta.size() == 2);
  CHECK(fm.beta(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fm.beta(1) == doctest::Approx(0.5).epsilon(1e-12));
  const std::vector<double> h{2.5, 2.5};
  CHECK(forecast_mean(fm, h) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("period-two series") {
  Eigen::RowVectorXd v(40);
  for (Index t = 0; t < 40; ++t) v(t) = t % 2 == 0 ? 1.0 : -1.0;
  const ForecastModel fm = fit_forecaster(TimeSeriesBatch::from_values(v), 3);
  // Min-norm solution of b1 - b2 = 1 and b2 - b1 = -1 (oldest lag first).
  CHECK(fm.beta(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fm.beta(1) == doctest::Approx(-0.5).epsilon(1e-12));
  const std::vector<double> h{-1.0, 1.0};
  CHECK(forecast_mean(fm, h) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("linear trend is extrapolated") {
  Eigen::RowVectorXd v = Eigen::RowVectorXd::LinSpaced(100, 0, 99);
  const ForecastModel fm = fit_forecaster(TimeSeriesBatch::from_values(v), 10);
  std::vector<double> h(9);
  for (int i = 0; i < 9; ++i) h[i] = 91.0 + i;
  CHECK(forecast_mean(fm, h) == doctest::Approx(100.0).epsilon(1e-6));
  const Eigen::VectorXd path = forecast_path(fm.beta, h, 5);
  for (Index s = 0; s < 5; ++s) CHECK(path(s) == doctest::Approx(100.0 + s).epsilon(1e-6));
}

TEST_CASE("harmonic forecast") {
  Eigen::RowVectorXd v(600);
  for (Index t = 0; t < 600; ++t) v(t) = std::cos(0.21 * static_cast<double>(t));
  const ForecastModel fm = fit_forecaster(TimeSeriesBatch::from_values(v), 12);
  std::vector<double> h(11);
  for (int i = 0; i < 11; ++i) h[i] = v(589 + i);
  const double truth = std::cos(0.21 * 600.0);
  CHECK(std::abs(forecast_mean(fm, h) - truth) < 1e-6);
}

TEST_CASE("all-zero history is degenerate") {
  const ForecastModel fm = fit_forecaster(TimeSeriesBatch::from_values(Eigen::RowVectorXd::Zero(20)), 4);
  CHECK(fm.degenerate);
  CHECK(fm.beta.isZero());
}

TEST_CASE("forecaster argument errors") {
  const ForecastModel fm = fit_forecaster(TimeSeriesBatch::from_values(Eigen::RowVectorXd::Ones(20)), 4);
  const std::vector<double> short_h{1.0};
  CHECK_CODE(forecast_mean(fm, short_h), ErrorCode::LengthMismatch);
  CHECK_CODE(fit_forecaster(TimeSeriesBatch::from_values(Eigen::RowVectorXd::Ones(20)), 1), ErrorCode::TooFewRows);
}

TEST_CASE("missing history entries count as zero") {
  const ForecastModel fm = fit_forecaster(TimeSeriesBatch::from_values(Eigen::RowVectorXd::Constant(30, 2.0)), 3);
  const std::vector<double> h{kMissing, 2.0};
  CHECK(forecast_mean(fm, h) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("variance of a deterministic series is zero") {
  Eigen::RowVectorXd v(200);
  for (Index t = 0; t < 200; ++t) v(t) = 1.0 + std::sin(0.1 * static_cast<double>(t));
  const VarianceImputation vi = impute_variance(TimeSeriesBatch::from_values(v), 10, 3, 5);
  CHECK(vi.variance.cwiseAbs().maxCoeff() < 1e-8);
  CHECK((vi.variance.array() >= 0).all());
}

TEST_CASE("property: imputed variance is never negative") {
  std::mt19937 gen(5);
  std::normal_distribution<double> g(0, 1);
  std::bernoulli_distribution miss(0.3);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd v(2, 300);
    for (Index i = 0; i < v.size(); ++i) v.data()[i] = miss(gen) ? kMissing : g(gen);
    const VarianceImputation vi = impute_variance(TimeSeriesBatch::from_values(v), 10);
    CHECK((vi.variance.array() >= 0).all());
  }
}

TEST_CASE("Gaussian noise variance is recovered") {
  std::mt19937 gen(9);
  std::normal_distribution<double> g(0, 1);
  Eigen::MatrixXd v(20, 2000);
  for (Index n = 0; n < 20; ++n)
    for (Index t = 0; t < 2000; ++t)
      v(n, t) = std::sin(0.01 * static_cast<double>(t)) + 0.5 * g(gen);
  const VarianceImputation vi = impute_variance(TimeSeriesBatch::from_values(v), 60);
  CHECK(vi.variance.mean() == doctest::Approx(0.25).epsilon(0.15));
  const VarianceForecaster vf = fit_variance_forecaster(TimeSeriesBatch::from_values(v), 60);
  std::vector<double> h(59);
  for (int i = 0; i < 59; ++i) h[i] = v(0, 2000 - 59 + i);
  CHECK(forecast_variance(vf, h) >= 0.0);
}
