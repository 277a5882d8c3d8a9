#pragma once

/// @file verification.hpp
/// Executable checks of the probabilistic claims behind the simulator, each
/// returning a pass/fail verdict with the measured quantity. The thresholds
/// are fixed here; the acceptance test binary and `umda_cli verify` both run
/// these.

#include <cstdint>
#include <string>
#include <vector>

namespace umda::verify {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string measured;
  double seconds = 0.0;
  double time_limit = 0.0;
};

inline constexpr std::uint64_t kDefaultSeed = 1;

/// E[min{C, Bin(D, p)}] >= Cp + p(1-p)min{C, D-C}/4 for all D <= 12, C <= D,
/// p in {0.05, ..., 0.95}, slack >= -1e-12; under 1 s.
CheckResult capped_binomial_bound();

/// 500 random Poisson-binomial instances (m <= 200): normalization 1e-12,
/// mean and variance 1e-9, unimodality around the mean; under 10 s.
CheckResult poisson_binomial_oracle(std::uint64_t seed = kDefaultSeed);

/// 200 random instances, m in [5, 200], p_i in [1/m, 1-1/m], ell = u = 1/4:
/// min_k pmf(k) max(1, sigma) > 0.1 on [k_ell, k_u] and the chunk carries
/// mass >= 1/2; under 10 s.
CheckResult chunk_probability_floor(std::uint64_t seed = kDefaultSeed);

/// Level-decomposition invariants over 10^4 simulated generations on a grid
/// of (n, mu, lambda); under 30 s.
CheckResult decomposition_invariants(std::uint64_t seed = kDefaultSeed);

/// n = 50, mu = 50, lambda = 100, X_t in {10, 25, 40}, 10^4 steps each: the
/// empirical CDF of X_{t+1} stays below the Bin(mu, X_t/mu) CDF + 0.03;
/// under 60 s.
CheckResult binomial_dominance(std::uint64_t seed = kDefaultSeed);

/// Same setting, X_t = 25: mean X_{t+1} - X_t > 0 with z >= 5; under 60 s.
CheckResult positive_drift(std::uint64_t seed = kDefaultSeed);

/// mu = ceil(3 sqrt(n) ln n), lambda = 2 mu, n in {64, 256, 1024}, 50 runs:
/// slope of median generations vs n in [0.4, 0.7], success >= 0.5 per n.
CheckResult sqrt_n_generation_scaling(std::uint64_t seed = kDefaultSeed, unsigned threads = 0);

/// mu = ceil(5 ln n), lambda = 2 mu, restricted, n in {128, 512, 2048},
/// 50 runs: slope in [0.8, 1.2], all runs succeed within 200 n generations.
CheckResult linear_generation_scaling(std::uint64_t seed = kDefaultSeed, unsigned threads = 0);

/// UMDA* at n = 500, 100 runs: mu = ceil(3 ln n) stagnates in >= 80 % of
/// runs; mu = ceil(3 sqrt(n) ln n) succeeds in >= 50 %.
CheckResult unrestricted_phase_transition(std::uint64_t seed = kDefaultSeed, unsigned threads = 0);

/// n = 500, lambda in {10, 14, ..., 150}, mu = lambda/2, 200 runs: the
/// window-5 smoothed runtime curve has an interior local minimum followed by
/// a local maximum, and Spearman(lambda, ln(border hits + 1)) <= -0.9;
/// under 15 min. `csv_out`, when non-empty, receives the sweep data.
CheckResult lambda_sweep_shape(std::uint64_t seed = kDefaultSeed, unsigned threads = 0,
                               const std::string& csv_out = {});

/// Reruns small sweep, scaling and phase experiments with identical
/// configuration (and different thread counts) and compares output bytes.
CheckResult rerun_determinism(const std::string& scratch_dir, std::uint64_t seed = kDefaultSeed);

/// The checks that finish within a minute in total (ids 1-6).
std::vector<CheckResult> run_quick(std::uint64_t seed = kDefaultSeed);

/// One line: "[PASS] 3 name: measured (1.2 s)".
std::string describe(const CheckResult& r);

}  // namespace umda::verify
