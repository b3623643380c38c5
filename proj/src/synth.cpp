#include "pagets/synth.hpp"

#include "pagets/error.hpp"
#include "pagets/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace pagets {

namespace {

// Stream ids keep every kind of draw independent of the others.
constexpr std::uint64_t kParamStream = 0;
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kMaskStream = 2;
constexpr std::uint64_t kArmStreamBase = 16;

std::vector<std::string> grid_names(Index n, Index m) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(n * m));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) names.push_back("s" + std::to_string(i) + "_" + std::to_string(j));
  return names;
}

// r x T harmonic mixtures, t = 1..T.
Eigen::MatrixXd harmonic_mixtures(Rng& rng, Index r, Index T, double alo, double ahi, double wlo, double whi) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(r, T);
  for (Index k = 0; k < r; ++k) {
    for (int h = 0; h < 4; ++h) {
      const double alpha = rng.uniform(alo, ahi);
      const double omega = rng.uniform(wlo, whi);
      for (Index t = 0; t < T; ++t)
        g(k, t) += alpha * std::cos(omega * static_cast<double>(t + 1) / static_cast<double>(T));
    }
  }
  return g;
}

// N x r loadings u_i v_j for series (i, j) -> i*m + j, shared by every mixture k.
Eigen::MatrixXd tensor_loadings(Rng& rng, Index n, Index m, Index r, bool unit) {
  Eigen::VectorXd u(n), v(m);
  for (Index i = 0; i < n; ++i) u(i) = unit ? 1.0 : rng.uniform();
  for (Index j = 0; j < m; ++j) v(j) = unit ? 1.0 : rng.uniform();
  Eigen::MatrixXd w(n * m, r);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) w.row(i * m + j).setConstant(u(i) * v(j));
  return w;
}

void normalise(Eigen::MatrixXd& x) {
  const double lo = x.minCoeff();
  const double hi = x.maxCoeff();
  if (hi > lo)
    x = (x.array() - lo) / (hi - lo);
  else
    x.setZero();
}

TimeSeriesBatch make_batch(std::vector<std::string> names, Eigen::MatrixXd values) {
  return TimeSeriesBatch::from_values(std::move(values), std::move(names));
}

std::string describe(std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [k, v] : kv) {
    os << (first ? "" : ",") << k << "=" << v;
    first = false;
  }
  return os.str();
}

}  // namespace

std::string_view to_string(ObservationLaw law) {
  switch (law) {
    case ObservationLaw::Exact: return "exact";
    case ObservationLaw::Gaussian: return "gaussian";
    case ObservationLaw::Bernoulli: return "bernoulli";
    case ObservationLaw::Poisson: return "poisson";
  }
  return "unknown";
}

SynthIParams synth_I_preset(std::string_view name) {
  SynthIParams p;
  if (name == "default" || name == "synthI") return p;
  if (name == "scalability") {
    p.alpha_lo = -1.5;
    p.alpha_hi = 1.5;
    p.omega_hi = 100.0;
    return p;
  }
  throw Error(ErrorCode::InvalidParams, "unknown Synthetic I preset '" + std::string(name) + "'");
}

SyntheticTruth gen_synthetic_I(const SynthIParams& p, std::uint64_t seed) {
  if (p.n < 1 || p.m < 1 || p.T < 1 || p.r < 1 || p.noise_sd < 0.0 || !(p.missing_prob >= 0.0 && p.missing_prob < 1.0) ||
      p.alpha_lo > p.alpha_hi || p.omega_lo > p.omega_hi)
    throw Error(ErrorCode::InvalidParams, "invalid Synthetic I parameters");
  Rng rng(seed, kParamStream);
  const Eigen::MatrixXd g = harmonic_mixtures(rng, p.r, p.T, p.alpha_lo, p.alpha_hi, p.omega_lo, p.omega_hi);
  const Eigen::MatrixXd w = tensor_loadings(rng, p.n, p.m, p.r, p.unit_factors);

  SyntheticTruth out;
  out.latent_mean = w * g;
  out.latent_var = Eigen::MatrixXd::Constant(out.latent_mean.rows(), p.T, p.noise_sd * p.noise_sd);
  Eigen::MatrixXd obs = out.latent_mean;
  if (p.noise_sd > 0.0) {
    Rng noise(seed, kNoiseStream);
    for (Index t = 0; t < obs.cols(); ++t)
      for (Index i = 0; i < obs.rows(); ++i) obs(i, t) += noise.normal(0.0, p.noise_sd);
  }
  if (p.missing_prob > 0.0) {
    Rng mask(seed, kMaskStream);
    for (Index t = 0; t < obs.cols(); ++t)
      for (Index i = 0; i < obs.rows(); ++i)
        if (mask.bernoulli(p.missing_prob)) obs(i, t) = kMissing;
  }
  out.observations = make_batch(grid_names(p.n, p.m), std::move(obs));
  out.kind = "synthetic-I";
  out.seed = seed;
  out.params = describe({{"n", double(p.n)}, {"m", double(p.m)}, {"T", double(p.T)}, {"r", double(p.r)},
                         {"alpha_lo", p.alpha_lo}, {"alpha_hi", p.alpha_hi}, {"omega_lo", p.omega_lo},
                         {"omega_hi", p.omega_hi}, {"noise_sd", p.noise_sd}, {"missing_prob", p.missing_prob}});
  return out;
}

Eigen::MatrixXd synthetic_II_latent(const SynthIIParams& p, std::uint64_t seed, int q) {
  if (q < 1 || q > 3) throw Error(ErrorCode::InvalidParams, "q must be 1, 2 or 3");
  if (p.n < 1 || p.m < 1 || p.T < 1 || p.ar_noise_sd < 0.0 || p.burn_in < 0)
    throw Error(ErrorCode::InvalidParams, "invalid Synthetic II parameters");
  constexpr Index r = 4;
  Rng rng(seed, kParamStream);
  Eigen::MatrixXd comp = harmonic_mixtures(rng, r, p.T, -1.0, 10.0, 1.0, 1000.0);
  const Eigen::MatrixXd w = tensor_loadings(rng, p.n, p.m, r, false);

  // Draw the trend and AR components unconditionally so every q shares the harmonics.
  Eigen::MatrixXd trend(r, p.T), ar(r, p.T);
  for (Index k = 0; k < r; ++k) {
    const double eta = rng.uniform(1e-4, 1e-3);
    for (Index t = 0; t < p.T; ++t) trend(k, t) = eta * static_cast<double>(t + 1);
  }
  Rng ar_noise(seed, kNoiseStream);
  for (Index k = 0; k < r; ++k) {
    double phi[3];
    do {
      for (double& f : phi) f = rng.uniform(0.1, 0.4);
    } while (phi[0] + phi[1] + phi[2] >= 1.0);  // nonnegative AR(3) is stationary iff the sum is < 1
    double lag[3] = {0.0, 0.0, 0.0};
    for (Index t = -p.burn_in; t < p.T; ++t) {
      const double x = phi[0] * lag[0] + phi[1] * lag[1] + phi[2] * lag[2] + ar_noise.normal(0.0, p.ar_noise_sd);
      lag[2] = lag[1];
      lag[1] = lag[0];
      lag[0] = x;
      if (t >= 0) ar(k, t) = x;
    }
  }
  if (q >= 2) comp += trend;
  if (q >= 3) comp += ar;
  Eigen::MatrixXd f = w * comp;
  normalise(f);
  return f;
}

SyntheticTruth gen_synthetic_II_arm(const SynthIIParams& p, std::uint64_t seed, int q, ObservationLaw law) {
  const Eigen::MatrixXd fq = synthetic_II_latent(p, seed, q);
  Rng rng(seed, kArmStreamBase + static_cast<std::uint64_t>(3 * q) + static_cast<std::uint64_t>(law));
  SyntheticTruth out;
  Eigen::MatrixXd obs(fq.rows(), fq.cols());
  switch (law) {
    case ObservationLaw::Gaussian: {
      out.latent_mean = q == 1 ? fq : synthetic_II_latent(p, seed, 1);
      out.latent_var = fq;
      for (Index t = 0; t < obs.cols(); ++t)
        for (Index i = 0; i < obs.rows(); ++i)
          obs(i, t) = rng.normal(out.latent_mean(i, t), std::sqrt(fq(i, t)));
      break;
    }
    case ObservationLaw::Bernoulli:
      out.latent_mean = fq;
      out.latent_var = fq.array() * (1.0 - fq.array());
      for (Index t = 0; t < obs.cols(); ++t)
        for (Index i = 0; i < obs.rows(); ++i) obs(i, t) = rng.bernoulli(fq(i, t)) ? 1.0 : 0.0;
      break;
    case ObservationLaw::Poisson:
      out.latent_mean = fq;
      out.latent_var = fq;
      for (Index t = 0; t < obs.cols(); ++t)
        for (Index i = 0; i < obs.rows(); ++i) obs(i, t) = static_cast<double>(rng.poisson(fq(i, t)));
      break;
    case ObservationLaw::Exact:
      throw Error(ErrorCode::InvalidParams, "Synthetic II arms are Gaussian, Bernoulli or Poisson");
  }
  out.observations = make_batch(grid_names(p.n, p.m), std::move(obs));
  static constexpr const char* kTrend[] = {"", "har", "har+trend", "har+trend+ar"};
  out.kind = "synthetic-II/" + std::string(to_string(law)) + "/" + kTrend[q];
  out.seed = seed;
  out.params = describe({{"n", double(p.n)}, {"m", double(p.m)}, {"T", double(p.T)}, {"q", double(q)},
                         {"ar_noise_sd", p.ar_noise_sd}, {"burn_in", double(p.burn_in)}});
  return out;
}

std::vector<SyntheticTruth> gen_synthetic_II(const SynthIIParams& p, std::uint64_t seed) {
  std::vector<SyntheticTruth> out;
  for (int q = 1; q <= 3; ++q)
    for (ObservationLaw law : {ObservationLaw::Gaussian, ObservationLaw::Bernoulli, ObservationLaw::Poisson})
      out.push_back(gen_synthetic_II_arm(p, seed, q, law));
  return out;
}

std::vector<SyntheticTruth> gen_synthetic_III(const SynthIIIParams& p, std::uint64_t seed) {
  if (p.T < 1 || p.gaussian_sd < 0.0 || p.alpha_lo > p.alpha_hi || p.omega_lo > p.omega_hi)
    throw Error(ErrorCode::InvalidParams, "invalid Synthetic III parameters");
  Rng rng(seed, kParamStream);
  Eigen::MatrixXd f = harmonic_mixtures(rng, 1, p.T, p.alpha_lo, p.alpha_hi, p.omega_lo, p.omega_hi);
  normalise(f);
  const std::string params = describe({{"T", double(p.T)}, {"alpha_lo", p.alpha_lo}, {"alpha_hi", p.alpha_hi},
                                       {"omega_lo", p.omega_lo}, {"omega_hi", p.omega_hi},
                                       {"gaussian_sd", p.gaussian_sd}});
  std::vector<SyntheticTruth> out;
  for (ObservationLaw law : {ObservationLaw::Gaussian, ObservationLaw::Bernoulli, ObservationLaw::Poisson}) {
    Rng draw(seed, kArmStreamBase + static_cast<std::uint64_t>(law));
    Eigen::MatrixXd obs(1, p.T);
    SyntheticTruth s;
    s.latent_mean = f;
    for (Index t = 0; t < p.T; ++t) {
      const double ft = f(0, t);
      if (law == ObservationLaw::Gaussian) obs(0, t) = draw.normal(ft, p.gaussian_sd);
      if (law == ObservationLaw::Bernoulli) obs(0, t) = draw.bernoulli(ft) ? 1.0 : 0.0;
      if (law == ObservationLaw::Poisson) obs(0, t) = static_cast<double>(draw.poisson(ft));
    }
    if (law == ObservationLaw::Gaussian) s.latent_var = Eigen::MatrixXd::Constant(1, p.T, p.gaussian_sd * p.gaussian_sd);
    if (law == ObservationLaw::Bernoulli) s.latent_var = f.array() * (1.0 - f.array());
    if (law == ObservationLaw::Poisson) s.latent_var = f;
    s.observations = make_batch({"f"}, std::move(obs));
    s.kind = "synthetic-III/" + std::string(to_string(law));
    s.seed = seed;
    s.params = params;
    out.push_back(std::move(s));
  }
  return out;
}

SyntheticTruth gen_lrf(Index K, Index R_max, Index N, Index T, std::uint64_t seed, double theta_scale) {
  if (K < 1 || R_max < 1 || N < 1 || T < 1) throw Error(ErrorCode::InvalidParams, "K, R_max, N, T must be >= 1");
  Rng rng(seed, kParamStream);
  const double Td = static_cast<double>(T);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(K, T);
  for (Index k = 0; k < K; ++k) {
    Index budget = 1 + static_cast<Index>(rng.uniform() * static_cast<double>(R_max));
    budget = std::min(budget, R_max);
    while (budget > 0) {
      const double pick = rng.uniform();
      if (budget >= 2 && pick < 0.5) {
        const double decay = rng.uniform(-1.0, 1.0) / Td;
        const double omega = rng.uniform(0.01, 1.0);
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        for (Index t = 0; t < T; ++t) {
          const double td = static_cast<double>(t);
          h(k, t) += std::exp(decay * td) * std::cos(omega * td + phase);
        }
        budget -= 2;
      } else if (pick < 0.75) {
        const Index degree = static_cast<Index>(rng.uniform() * static_cast<double>(budget));
        Eigen::VectorXd c(degree + 1);
        for (Index d = 0; d <= degree; ++d) c(d) = rng.uniform(-1.0, 1.0);
        for (Index t = 0; t < T; ++t) {
          const double x = static_cast<double>(t) / Td;
          double acc = 0.0;
          for (Index d = degree; d >= 0; --d) acc = acc * x + c(d);
          h(k, t) += acc;
        }
        budget -= degree + 1;
      } else {
        const double rate = rng.uniform(-2.0, 2.0) / Td;
        const double amp = rng.uniform(-1.0, 1.0);
        for (Index t = 0; t < T; ++t) h(k, t) += amp * std::exp(rate * static_cast<double>(t));
        budget -= 1;
      }
    }
  }
  Eigen::MatrixXd theta(N, K);
  for (Index n = 0; n < N; ++n)
    for (Index k = 0; k < K; ++k) theta(n, k) = theta_scale * rng.normal();

  SyntheticTruth out;
  out.latent_mean = theta * h;
  out.latent_var = Eigen::MatrixXd::Zero(N, T);
  out.observations = make_batch({}, out.latent_mean);
  out.kind = "lrf";
  out.seed = seed;
  out.params = describe({{"K", double(K)}, {"R_max", double(R_max)}, {"N", double(N)}, {"T", double(T)},
                         {"theta_scale", theta_scale}});
  return out;
}

}  // namespace pagets
