#pragma once

/// @file bitmodel.hpp
/// Bit strings, OneMax fitness, the frequency vector and population sampling.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "umda/rng.hpp"

namespace umda {

/// Packed bit string. Bits beyond size() in the last word are always zero.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t size, bool value = false);

  /// Parses a string of '0'/'1' characters, position 0 first.
  static BitString from_string(std::string_view text);

  std::size_t size() const noexcept { return size_; }
  bool operator[](std::size_t i) const noexcept { return (words_[i >> 6U] >> (i & 63U)) & 1U; }
  void set(std::size_t i, bool value) noexcept;

  std::size_t count() const noexcept;
  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> mutable_words() noexcept { return words_; }
  std::string to_string() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

constexpr std::size_t words_for(std::size_t bits) noexcept { return (bits + 63U) / 64U; }

/// The optimum `a` of OneMax_a.
class TargetString {
 public:
  TargetString() = default;
  explicit TargetString(BitString bits) : bits_(std::move(bits)) {}
  static TargetString all_ones(std::size_t n) { return TargetString(BitString(n, true)); }

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const noexcept { return bits_[i]; }
  const BitString& bits() const noexcept { return bits_; }

  friend bool operator==(const TargetString&, const TargetString&) = default;

 private:
  BitString bits_;
};

/// Number of one bits.
std::size_t onemax(const BitString& x) noexcept;

/// n minus the Hamming distance between `x` and `a`.
std::size_t onemax_a(const BitString& x, const TargetString& a);

/// Same as onemax_a on raw packed words of equal length; tail bits must be zero.
std::size_t onemax_a(std::span<const std::uint64_t> x, std::span<const std::uint64_t> a,
                     std::size_t n) noexcept;

class Individual {
 public:
  Individual(BitString bits, const TargetString& target)
      : fitness_(onemax_a(bits, target)), bits_(std::move(bits)) {}
  /// Plain OneMax fitness.
  explicit Individual(BitString bits) : fitness_(onemax(bits)), bits_(std::move(bits)) {}

  const BitString& bits() const noexcept { return bits_; }
  std::size_t fitness() const noexcept { return fitness_; }

 private:
  std::size_t fitness_;
  BitString bits_;
};

enum class Borders { restricted, unrestricted };

std::string_view to_string(Borders borders) noexcept;
Borders parse_borders(std::string_view text);

/// The probabilistic model p_t. Restricted vectors live in [1/n, 1 - 1/n],
/// unrestricted ones in [0, 1]; construction enforces this.
class FrequencyVector {
 public:
  FrequencyVector() = default;
  FrequencyVector(std::vector<double> values, Borders borders);

  /// All frequencies 1/2.
  static FrequencyVector uniform(std::size_t n, Borders borders);

  std::size_t size() const noexcept { return values_.size(); }
  Borders borders() const noexcept { return borders_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  /// Smallest and largest admissible value: 1/n and 1 - 1/n when restricted.
  double lower() const noexcept { return lower_bound(size(), borders_); }
  double upper() const noexcept { return upper_bound(size(), borders_); }

  static double lower_bound(std::size_t n, Borders borders) noexcept;
  static double upper_bound(std::size_t n, Borders borders) noexcept;

  friend bool operator==(const FrequencyVector&, const FrequencyVector&) = default;

 private:
  std::vector<double> values_;
  Borders borders_ = Borders::restricted;
};

/// Sampled offspring of one generation, stored contiguously.
class Population {
 public:
  Population() = default;
  Population(std::size_t n, std::size_t count);
  static Population from_individuals(std::span<const Individual> individuals);

  std::size_t size() const noexcept { return fitness_.size(); }
  std::size_t n() const noexcept { return n_; }
  std::size_t words_per_individual() const noexcept { return stride_; }

  std::span<const std::uint64_t> words(std::size_t j) const noexcept {
    return {bits_.data() + j * stride_, stride_};
  }
  std::span<std::uint64_t> mutable_words(std::size_t j) noexcept {
    return {bits_.data() + j * stride_, stride_};
  }
  bool bit(std::size_t j, std::size_t i) const noexcept {
    return (bits_[j * stride_ + (i >> 6U)] >> (i & 63U)) & 1U;
  }
  void set_bit(std::size_t j, std::size_t i, bool value) noexcept;

  std::size_t fitness(std::size_t j) const noexcept { return fitness_[j]; }
  std::span<const std::size_t> fitness() const noexcept { return fitness_; }
  /// Recomputes the cached fitness of row j after its bits were written.
  void refresh_fitness(std::size_t j, const TargetString& target) noexcept;

  BitString bit_string(std::size_t j) const;
  /// Copies the given rows (in the given order) into a new population.
  Population subset(std::span<const std::size_t> rows) const;

 private:
  std::size_t n_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::size_t> fitness_;
};

/// Reference sampler: bit i is rng.bernoulli(p_i), drawn in index order.
Individual sample_individual(const FrequencyVector& p, Pcg32& rng, const TargetString& target);
Individual sample_individual(const FrequencyVector& p, Pcg32& rng);

/// Fast sampler for whole populations.
///
/// Interior frequencies use one PCG32 output per bit compared against
/// ceil(p * 2^32), which is exactly the bernoulli() mapping. In restricted mode
/// positions sitting at a border share one value, so their rare deviating
/// bits are placed by geometric skipping instead of per-bit draws. Positions
/// at 0 or 1 consume no randomness. The output distribution is the product
/// distribution in every case; only the consumption of the stream differs
/// from sample_individual().
class PopulationSampler {
 public:
  explicit PopulationSampler(const FrequencyVector& p);

  /// Overwrites every row of `out` with a fresh sample.
  void sample_into(Population& out, Pcg32& rng, const TargetString& target) const;

 private:
  struct SkipGroup {
    std::vector<std::uint32_t> positions;
    double inv_log_keep = 0.0;  // 1 / ln(1 - flip probability)
  };

  void apply_skip_group(const SkipGroup& group, std::span<std::uint64_t> words, Pcg32& rng) const;

  std::size_t n_;
  std::vector<std::uint64_t> base_;
  std::vector<std::uint32_t> dense_positions_;
  std::vector<std::uint64_t> dense_thresholds_;
  SkipGroup rare_zeros_;  // at the upper border: default 1, flip to 0
  SkipGroup rare_ones_;   // at the lower border: default 0, flip to 1
};

/// lambda independent individuals drawn with PopulationSampler.
Population sample_population(const FrequencyVector& p, std::size_t lambda, Pcg32& rng,
                             const TargetString& target);
Population sample_population(const FrequencyVector& p, std::size_t lambda, Pcg32& rng);

}  // namespace umda
