#include "umda/bitmodel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "umda/error.hpp"

namespace umda {

namespace {

// Below this size the border probability 1/n is too large for skipping to pay off.
constexpr std::size_t kMinSkipSize = 16;

std::uint64_t tail_mask(std::size_t bits) noexcept {
  const std::size_t rem = bits & 63U;
  return rem == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << rem) - 1U;
}

}  // namespace

BitString::BitString(std::size_t size, bool value)
    : size_(size), words_(words_for(size), value ? ~std::uint64_t{0} : 0U) {
  if (value && !words_.empty()) words_.back() &= tail_mask(size);
}

BitString BitString::from_string(std::string_view text) {
  BitString out(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    require(text[i] == '0' || text[i] == '1', "BitString: expected only '0' and '1'");
    out.set(i, text[i] == '1');
  }
  return out;
}

void BitString::set(std::size_t i, bool value) noexcept {
  const std::uint64_t mask = std::uint64_t{1} << (i & 63U);
  if (value) {
    words_[i >> 6U] |= mask;
  } else {
    words_[i >> 6U] &= ~mask;
  }
}

std::size_t BitString::count() const noexcept {
  std::size_t total = 0;
  for (const auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::string BitString::to_string() const {
  std::string out(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) {
    if ((*this)[i]) out[i] = '1';
  }
  return out;
}

std::size_t onemax(const BitString& x) noexcept { return x.count(); }

std::size_t onemax_a(const BitString& x, const TargetString& a) {
  require(x.size() == a.size(), "onemax_a: length mismatch between x and target");
  return onemax_a(x.words(), a.bits().words(), x.size());
}

std::size_t onemax_a(std::span<const std::uint64_t> x, std::span<const std::uint64_t> a,
                     std::size_t n) noexcept {
  std::size_t distance = 0;
  for (std::size_t w = 0; w < x.size(); ++w) {
    distance += static_cast<std::size_t>(std::popcount(x[w] ^ a[w]));
  }
  return n - distance;
}

std::string_view to_string(Borders borders) noexcept {
  return borders == Borders::restricted ? "restricted" : "unrestricted";
}

Borders parse_borders(std::string_view text) {
  if (text == "restricted" || text == "umda") return Borders::restricted;
  if (text == "unrestricted" || text == "umda*" || text == "umdastar") return Borders::unrestricted;
  throw ConfigError("unknown borders value '" + std::string(text) + "'");
}

double FrequencyVector::lower_bound(std::size_t n, Borders borders) noexcept {
  return borders == Borders::restricted ? 1.0 / static_cast<double>(n) : 0.0;
}

double FrequencyVector::upper_bound(std::size_t n, Borders borders) noexcept {
  return borders == Borders::restricted
             ? (static_cast<double>(n) - 1.0) / static_cast<double>(n)
             : 1.0;
}

FrequencyVector::FrequencyVector(std::vector<double> values, Borders borders)
    : values_(std::move(values)), borders_(borders) {
  require(!values_.empty(), "FrequencyVector: n must be at least 1");
  require(borders_ == Borders::unrestricted || values_.size() >= 2,
          "FrequencyVector: restricted borders need n >= 2");
  const double lo = lower();
  const double hi = upper();
  for (const double v : values_) {
    require(v >= lo && v <= hi, "FrequencyVector: value outside the admissible range");
  }
}

FrequencyVector FrequencyVector::uniform(std::size_t n, Borders borders) {
  return FrequencyVector(std::vector<double>(n, 0.5), borders);
}

Population::Population(std::size_t n, std::size_t count)
    : n_(n), stride_(words_for(n)), bits_(stride_ * count, 0U), fitness_(count, 0U) {}

Population Population::from_individuals(std::span<const Individual> individuals) {
  require(!individuals.empty(), "Population: no individuals");
  const std::size_t n = individuals.front().bits().size();
  Population out(n, individuals.size());
  for (std::size_t j = 0; j < individuals.size(); ++j) {
    const auto& ind = individuals[j];
    require(ind.bits().size() == n, "Population: individuals of different lengths");
    const auto src = ind.bits().words();
    std::copy(src.begin(), src.end(), out.mutable_words(j).begin());
    out.fitness_[j] = ind.fitness();
  }
  return out;
}

void Population::set_bit(std::size_t j, std::size_t i, bool value) noexcept {
  const std::uint64_t mask = std::uint64_t{1} << (i & 63U);
  auto& w = bits_[j * stride_ + (i >> 6U)];
  w = value ? (w | mask) : (w & ~mask);
}

void Population::refresh_fitness(std::size_t j, const TargetString& target) noexcept {
  fitness_[j] = onemax_a(words(j), target.bits().words(), n_);
}

BitString Population::bit_string(std::size_t j) const {
  BitString out(n_);
  const auto src = words(j);
  std::copy(src.begin(), src.end(), out.mutable_words().begin());
  return out;
}

Population Population::subset(std::span<const std::size_t> rows) const {
  Population out(n_, rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto src = words(rows[k]);
    std::copy(src.begin(), src.end(), out.mutable_words(k).begin());
    out.fitness_[k] = fitness_[rows[k]];
  }
  return out;
}

Individual sample_individual(const FrequencyVector& p, Pcg32& rng, const TargetString& target) {
  BitString bits(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) bits.set(i, rng.bernoulli(p[i]));
  return Individual(std::move(bits), target);
}

Individual sample_individual(const FrequencyVector& p, Pcg32& rng) {
  return sample_individual(p, rng, TargetString::all_ones(p.size()));
}

PopulationSampler::PopulationSampler(const FrequencyVector& p)
    : n_(p.size()), base_(words_for(p.size()), 0U) {
  const bool skip = p.borders() == Borders::restricted && n_ >= kMinSkipSize;
  const double lo = p.lower();
  const double hi = p.upper();
  for (std::size_t i = 0; i < n_; ++i) {
    const double v = p[i];
    const auto pos = static_cast<std::uint32_t>(i);
    if (v == 1.0) {
      base_[i >> 6U] |= std::uint64_t{1} << (i & 63U);
    } else if (v == 0.0) {
      continue;
    } else if (skip && v == hi) {
      base_[i >> 6U] |= std::uint64_t{1} << (i & 63U);
      rare_zeros_.positions.push_back(pos);
    } else if (skip && v == lo) {
      rare_ones_.positions.push_back(pos);
    } else {
      dense_positions_.push_back(pos);
      dense_thresholds_.push_back(static_cast<std::uint64_t>(std::ceil(std::ldexp(v, 32))));
    }
  }
  if (skip) {
    const double flip = 1.0 / static_cast<double>(n_);
    rare_zeros_.inv_log_keep = 1.0 / std::log1p(-flip);
    rare_ones_.inv_log_keep = rare_zeros_.inv_log_keep;
  }
}

void PopulationSampler::apply_skip_group(const SkipGroup& group, std::span<std::uint64_t> words,
                                         Pcg32& rng) const {
  const std::size_t k = group.positions.size();
  if (k == 0) return;
  // Gap to the next flipped position is geometric: P(gap >= g) = (1 - q)^g.
  std::size_t idx = 0;
  for (;;) {
    const double gap = std::floor(std::log(rng.uniform_open_closed()) * group.inv_log_keep);
    if (gap >= static_cast<double>(k - idx)) return;
    idx += static_cast<std::size_t>(gap);
    const std::uint32_t pos = group.positions[idx];
    words[pos >> 6U] ^= std::uint64_t{1} << (pos & 63U);
    if (++idx == k) return;
  }
}

void PopulationSampler::sample_into(Population& out, Pcg32& rng, const TargetString& target) const {
  require(out.n() == n_, "PopulationSampler: population length mismatch");
  require(target.size() == n_, "PopulationSampler: target length mismatch");
  const std::size_t dense = dense_positions_.size();
  for (std::size_t j = 0; j < out.size(); ++j) {
    auto words = out.mutable_words(j);
    std::copy(base_.begin(), base_.end(), words.begin());
    for (std::size_t d = 0; d < dense; ++d) {
      const std::uint32_t pos = dense_positions_[d];
      const std::uint64_t bit = rng.next_u32() < dense_thresholds_[d] ? 1U : 0U;
      words[pos >> 6U] |= bit << (pos & 63U);
    }
    apply_skip_group(rare_zeros_, words, rng);
    apply_skip_group(rare_ones_, words, rng);
    out.refresh_fitness(j, target);
  }
}

Population sample_population(const FrequencyVector& p, std::size_t lambda, Pcg32& rng,
                             const TargetString& target) {
  require(lambda >= 1, "sample_population: lambda must be at least 1");
  Population pop(p.size(), lambda);
  PopulationSampler(p).sample_into(pop, rng, target);
  return pop;
}

Population sample_population(const FrequencyVector& p, std::size_t lambda, Pcg32& rng) {
  return sample_population(p, lambda, rng, TargetString::all_ones(p.size()));
}

}  // namespace umda
