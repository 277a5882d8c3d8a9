#pragma once

/// @file oracles.hpp
/// Exact reference computations (Poisson binomial and binomial laws) and the
/// Monte Carlo single-step probes used to check the selection bias on one bit.
/// Nothing here calls into the simulator except the step probes, which
/// deliberately run real generations.

#include <cstddef>
#include <span>
#include <vector>

#include "umda/bitmodel.hpp"
#include "umda/rng.hpp"

namespace umda {

/// Exact law of a sum of independent Bernoulli trials.
struct PmfTable {
  std::vector<double> probabilities;
  std::vector<double> pmf;
  /// sum p_i and sum p_i (1 - p_i), computed from the probabilities.
  double mean = 0.0;
  double variance = 0.0;

  double cdf(std::size_t k) const;
  /// P(X >= k).
  double survival(std::size_t k) const;
};

/// Iterated convolution, O(m^2). Requires every p_i in [0, 1].
PmfTable poisson_binomial_pmf(std::span<const double> p);

/// Kahan-compensated total mass, mean and variance of a pmf.
struct PmfMoments {
  double total = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};
PmfMoments pmf_moments(std::span<const double> pmf);

struct ChunkBounds {
  double ell = 0.0;
  double u = 0.0;
  /// min { i : P(X <= i) >= ell }
  std::size_t k_ell = 0;
  /// max { i : P(X >= i) >= u }
  std::size_t k_u = 0;
};

/// Requires ell, u in (0, 1) with ell + u < 1.
ChunkBounds chunk_bounds(const PmfTable& pmf, double ell, double u);

/// min over k in [k_ell, k_u] of pmf(k) * max(1, sigma).
double verify_chunk_lower_bound(std::span<const double> p, double ell, double u);

/// Bin(d, p) pmf, d <= 60.
std::vector<double> binomial_pmf(std::size_t d, double p);
/// P(Bin(d, p) <= k) for k = 0..d.
std::vector<double> binomial_cdf(std::size_t d, double p);

/// E[min{c, X}] for X ~ Bin(d, p), by summation over the exact pmf.
/// Requires 1 <= c <= d.
double expected_min_capped_binomial(std::size_t c, std::size_t d, double p);

/// c p + p (1 - p) min{c, d - c} / 4. Requires 1 <= c <= d.
double capped_binomial_lower_bound(std::size_t c, std::size_t d, double p);

/// Draws `trials` independent single generations from `p` with the focal
/// frequency replaced by x_t / mu (borders taken from `p`), and returns the
/// number of ones at the focal bit among the mu selected in each.
std::vector<std::size_t> sample_next_focal_counts(const FrequencyVector& p, std::size_t mu,
                                                  std::size_t lambda, std::size_t focal_bit,
                                                  std::size_t x_t, std::size_t trials,
                                                  Pcg32& rng);

struct DriftEstimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
  /// mean / stderr; 0 when the sample has no spread.
  double z = 0.0;
};

/// Mean and standard error of X_{t+1} - X_t over `trials` single generations.
DriftEstimate empirical_step_drift(const FrequencyVector& p, std::size_t mu, std::size_t lambda,
                                   std::size_t focal_bit, std::size_t x_t, std::size_t trials,
                                   Pcg32& rng);

/// max_k (F_empirical(k) - P(Bin(mu, prob) <= k)); non-positive values mean
/// the sample lies below the binomial CDF everywhere.
double dominance_excess(std::span<const std::size_t> samples, std::size_t mu, double prob);

/// Dvoretzky-Kiefer-Wolfowitz half-width sqrt(ln(2/alpha) / (2 n)).
double dkw_epsilon(std::size_t samples, double alpha);

}  // namespace umda
