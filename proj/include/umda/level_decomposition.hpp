#pragma once

/// @file level_decomposition.hpp
/// Ranking of a sampled population by its fitness on all bits but a focal bit j.
///
/// The level of an individual is its OneMax_a value over the other n - 1 bits,
/// so levels run from 0 to n - 1. With C_i the size of level i and C_{>=i} the
/// number of individuals at level i or above,
///
///     M   = max { i in [1, n-1] : C_{>=i-1} > mu }
///     C** = mu - C_{>=M}        (slots left for level M - 1)
///     D*  = C_{M-1}             (2nd-class candidates)
///
/// Individuals at level >= M + 1 are selected whatever their focal bit is
/// (1st class). C_{>=0} = lambda > mu, hence M >= 1, and
/// D* - C** = C_{>=M-1} - mu >= 1. Only when M = n - 1 can C_{>=M} exceed mu;
/// that case is flagged as degenerate and C** is reported clamped at 0.
///
/// This is an observer: it recomputes everything from the raw population and
/// never feeds back into the algorithm.

#include <cstddef>
#include <span>
#include <vector>

#include "umda/bitmodel.hpp"
#include "umda/rng.hpp"

namespace umda {

struct LevelDecomposition {
  std::size_t focal_bit = 0;
  std::size_t mu = 0;
  /// Level of every individual, in population order.
  std::vector<std::size_t> levels;
  /// C_i for i in [0, n-1].
  std::vector<std::size_t> level_counts;
  /// C_{>=i} for i in [0, n]; cumulative[n] = 0.
  std::vector<std::size_t> cumulative;
  std::size_t m = 0;
  std::size_t c_geq_m = 0;
  /// mu - C_{>=M}; negative only in the degenerate case.
  std::ptrdiff_t c_star_star_raw = 0;
  /// max(0, c_star_star_raw).
  std::size_t c_star_star = 0;
  std::size_t d_star = 0;
  /// D* - C** = C_{>=M-1} - mu (using the unclamped C**); always >= 1.
  std::ptrdiff_t overhang = 0;
  /// C_{>=M} > mu, possible only for M = n - 1.
  bool degenerate = false;
  std::vector<std::size_t> first_class_ids;
  std::vector<std::size_t> candidate_ids;
};

/// Decomposition from precomputed levels (each in [0, n-1]). Requires n >= 2
/// and levels.size() > mu >= 1.
LevelDecomposition decompose_levels(std::span<const std::size_t> levels, std::size_t n,
                                    std::size_t mu, std::size_t focal_bit = 0);

/// Decomposition of a sampled population with respect to OneMax_a.
LevelDecomposition decompose(const Population& pop, std::size_t mu, std::size_t focal_bit,
                             const TargetString& target);
LevelDecomposition decompose(const Population& pop, std::size_t mu, std::size_t focal_bit);

struct SecondClassSample {
  std::vector<std::size_t> c_star_star;
  std::vector<std::ptrdiff_t> overhang;
  std::size_t degenerate_trials = 0;

  double mean_c_star_star() const;
  double mean_overhang() const;
  std::ptrdiff_t min_overhang() const;
};

/// Monte Carlo tally of (C**, D* - C**) over `trials` independently sampled
/// populations of size lambda drawn from `p` (target: all ones).
SecondClassSample second_class_count_distribution(const FrequencyVector& p, std::size_t mu,
                                                  std::size_t lambda, std::size_t focal_bit,
                                                  std::size_t trials, Pcg32& rng);

}  // namespace umda
