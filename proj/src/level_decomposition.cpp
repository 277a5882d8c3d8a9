#include "umda/level_decomposition.hpp"

#include <algorithm>
#include <numeric>

#include "umda/error.hpp"

namespace umda {

LevelDecomposition decompose_levels(std::span<const std::size_t> levels, std::size_t n,
                                    std::size_t mu, std::size_t focal_bit) {
  require(n >= 2, "decompose: n must be at least 2");
  require(mu >= 1, "decompose: mu must be at least 1");
  require(levels.size() > mu, "decompose: population size must exceed mu");
  require(focal_bit < n, "decompose: focal bit out of range");

  LevelDecomposition d;
  d.focal_bit = focal_bit;
  d.mu = mu;
  d.levels.assign(levels.begin(), levels.end());
  d.level_counts.assign(n, 0);
  for (const auto level : levels) {
    require(level < n, "decompose: level exceeds n - 1");
    ++d.level_counts[level];
  }
  d.cumulative.assign(n + 1, 0);
  for (std::size_t i = n; i-- > 0;) d.cumulative[i] = d.cumulative[i + 1] + d.level_counts[i];

  // C_{>=0} = lambda > mu, so i = 1 always qualifies.
  d.m = 1;
  for (std::size_t i = n - 1; i >= 1; --i) {
    if (d.cumulative[i - 1] > mu) {
      d.m = i;
      break;
    }
  }
  d.c_geq_m = d.cumulative[d.m];
  d.degenerate = d.c_geq_m > mu;
  d.c_star_star_raw = static_cast<std::ptrdiff_t>(mu) - static_cast<std::ptrdiff_t>(d.c_geq_m);
  d.c_star_star = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, d.c_star_star_raw));
  d.d_star = d.level_counts[d.m - 1];
  d.overhang = static_cast<std::ptrdiff_t>(d.d_star) - d.c_star_star_raw;

  for (std::size_t j = 0; j < levels.size(); ++j) {
    if (levels[j] >= d.m + 1) d.first_class_ids.push_back(j);
    if (levels[j] == d.m - 1) d.candidate_ids.push_back(j);
  }
  return d;
}

LevelDecomposition decompose(const Population& pop, std::size_t mu, std::size_t focal_bit,
                             const TargetString& target) {
  require(target.size() == pop.n(), "decompose: target length differs from n");
  require(focal_bit < pop.n(), "decompose: focal bit out of range");
  std::vector<std::size_t> levels(pop.size());
  const bool want = target[focal_bit];
  for (std::size_t j = 0; j < pop.size(); ++j) {
    levels[j] = pop.fitness(j) - (pop.bit(j, focal_bit) == want ? 1U : 0U);
  }
  return decompose_levels(levels, pop.n(), mu, focal_bit);
}

LevelDecomposition decompose(const Population& pop, std::size_t mu, std::size_t focal_bit) {
  return decompose(pop, mu, focal_bit, TargetString::all_ones(pop.n()));
}

double SecondClassSample::mean_c_star_star() const {
  if (c_star_star.empty()) return 0.0;
  const double sum = std::accumulate(c_star_star.begin(), c_star_star.end(), 0.0);
  return sum / static_cast<double>(c_star_star.size());
}

double SecondClassSample::mean_overhang() const {
  if (overhang.empty()) return 0.0;
  const double sum = std::accumulate(overhang.begin(), overhang.end(), 0.0);
  return sum / static_cast<double>(overhang.size());
}

std::ptrdiff_t SecondClassSample::min_overhang() const {
  return overhang.empty() ? 0 : *std::min_element(overhang.begin(), overhang.end());
}

SecondClassSample second_class_count_distribution(const FrequencyVector& p, std::size_t mu,
                                                  std::size_t lambda, std::size_t focal_bit,
                                                  std::size_t trials, Pcg32& rng) {
  require(trials >= 1, "second_class_count_distribution: trials must be at least 1");
  require(lambda > mu, "second_class_count_distribution: lambda must exceed mu");
  const auto target = TargetString::all_ones(p.size());
  const PopulationSampler sampler(p);
  Population pop(p.size(), lambda);
  SecondClassSample out;
  out.c_star_star.reserve(trials);
  out.overhang.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    sampler.sample_into(pop, rng, target);
    const auto d = decompose(pop, mu, focal_bit, target);
    out.c_star_star.push_back(d.c_star_star);
    out.overhang.push_back(d.overhang);
    if (d.degenerate) ++out.degenerate_trials;
  }
  return out;
}

}  // namespace umda
