#pragma once

#include "pagets/ingestion.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pagets {

enum class ObservationLaw { Exact, Gaussian, Bernoulli, Poisson };
std::string_view to_string(ObservationLaw law);

/// Observations plus the latent mean and variance they were drawn from.
struct SyntheticTruth {
  TimeSeriesBatch observations;
  Eigen::MatrixXd latent_mean;  // N x T
  Eigen::MatrixXd latent_var;   // N x T
  std::string kind;
  std::uint64_t seed = 0;
  std::string params;
};

/// Mixture-of-harmonics tensor: X_ij(t) = sum_k u_i v_j g_k(t),
/// g_k(t) = sum_h alpha_h cos(omega_h t / T), t = 1..T.
struct SynthIParams {
  Index n = 20;
  Index m = 20;
  Index T = 15000;
  Index r = 4;
  double alpha_lo = -1.0;
  double alpha_hi = 10.0;
  double omega_lo = 1.0;
  double omega_hi = 1000.0;
  double noise_sd = 0.0;      // additive Gaussian observation noise
  double missing_prob = 0.0;  // each entry independently missing
  bool unit_factors = false;  // u = v = 1
};

/// "default" (alpha in [-1, 10], omega in [1, 1000]) or "scalability"
/// (alpha in [-1.5, 1.5], omega in [1, 100]). InvalidParams otherwise.
SynthIParams synth_I_preset(std::string_view name);
SyntheticTruth gen_synthetic_I(const SynthIParams& params, std::uint64_t seed);

/// Components shared by the variance benchmark tensors.
struct SynthIIParams {
  Index n = 20;
  Index m = 20;
  Index T = 15000;
  double ar_noise_sd = 0.1;
  Index burn_in = 100;
};

/// q = 1 harmonics, 2 harmonics + trend, 3 harmonics + trend + AR; each
/// min-max normalised to [0, 1] over the whole tensor.
Eigen::MatrixXd synthetic_II_latent(const SynthIIParams& params, std::uint64_t seed, int q);

/// One arm: Gaussian N(F^1, F^q), Bernoulli(F^q) or Poisson(F^q).
SyntheticTruth gen_synthetic_II_arm(const SynthIIParams& params, std::uint64_t seed, int q, ObservationLaw law);

/// All nine arms, ordered q-major then Gaussian, Bernoulli, Poisson.
std::vector<SyntheticTruth> gen_synthetic_II(const SynthIIParams& params, std::uint64_t seed);

/// One harmonic sum normalised to [0, 1], observed three ways.
struct SynthIIIParams {
  Index T = 100000;
  double alpha_lo = -1.5;
  double alpha_hi = 1.5;
  double omega_lo = 1.0;
  double omega_hi = 100.0;
  double gaussian_sd = 0.5;
};

/// Gaussian, Bernoulli, Poisson arms over the same latent f.
std::vector<SyntheticTruth> gen_synthetic_III(const SynthIIIParams& params, std::uint64_t seed);

/// Noiseless multivariate LRF: f_n = sum_k theta_nk h_k with h_k of order
/// at most R_max, built from exponential, damped-cosine and polynomial
/// components. Stacked Page matrix rank <= K * R_max.
SyntheticTruth gen_lrf(Index K, Index R_max, Index N, Index T, std::uint64_t seed, double theta_scale = 1.0);

}  // namespace pagets
