#include "umda/umda.hpp"

#include <algorithm>
#include <bit>

#include "umda/error.hpp"

namespace umda {

void UmdaConfig::validate() const {
  require(n >= 1, "UmdaConfig: n must be at least 1");
  require(borders == Borders::unrestricted || n >= 2, "UmdaConfig: restricted borders need n >= 2");
  require(mu >= 1, "UmdaConfig: mu must be at least 1");
  require(mu < lambda, "UmdaConfig: mu must be smaller than lambda");
  require(!target || target->size() == n, "UmdaConfig: target length differs from n");
  require(generation_budget() >= 1, "UmdaConfig: generation budget must be positive");
}

TargetString UmdaConfig::resolved_target() const {
  return target ? *target : TargetString::all_ones(n);
}

std::string_view to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::optimum_found:
      return "optimum_found";
    case Verdict::stagnated:
      return "stagnated";
    case Verdict::budget_exhausted:
      break;
  }
  return "budget_exhausted";
}

std::vector<std::size_t> select_mu_best_indices(std::span<const std::size_t> fitness,
                                                std::size_t mu, Pcg32& rng) {
  require(mu >= 1, "select_mu_best: mu must be at least 1");
  require(mu <= fitness.size(), "select_mu_best: mu exceeds the population size");
  std::vector<std::size_t> out;
  out.reserve(mu);
  if (mu == fitness.size()) {
    for (std::size_t j = 0; j < fitness.size(); ++j) out.push_back(j);
    return out;
  }

  std::vector<std::size_t> sorted(fitness.begin(), fitness.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mu - 1),
                   sorted.end(), std::greater<>{});
  const std::size_t cutoff = sorted[mu - 1];

  std::vector<std::size_t> ties;
  for (std::size_t j = 0; j < fitness.size(); ++j) {
    if (fitness[j] > cutoff) {
      out.push_back(j);
    } else if (fitness[j] == cutoff) {
      ties.push_back(j);
    }
  }
  const std::size_t need = mu - out.size();
  if (need < ties.size()) {
    // Partial Fisher-Yates: the first `need` entries are a uniform subset.
    for (std::size_t k = 0; k < need; ++k) {
      const auto pick = k + rng.bounded(static_cast<std::uint32_t>(ties.size() - k));
      std::swap(ties[k], ties[pick]);
    }
  }
  out.insert(out.end(), ties.begin(), ties.begin() + static_cast<std::ptrdiff_t>(need));
  return out;
}

Population select_mu_best(const Population& pop, std::size_t mu, Pcg32& rng) {
  const auto rows = select_mu_best_indices(pop.fitness(), mu, rng);
  return pop.subset(rows);
}

std::vector<std::uint32_t> count_ones(const Population& pop, std::span<const std::size_t> rows) {
  const std::size_t n = pop.n();
  const std::size_t stride = pop.words_per_individual();
  const std::size_t count = rows.empty() ? pop.size() : rows.size();
  // Per word, iterate whichever of ones/zeros is sparser; `inverted[w]` counts
  // the rows whose zeros were tallied (into `zeros`) for word w.
  std::vector<std::uint32_t> ones(stride * 64U, 0U);
  std::vector<std::uint32_t> zeros(stride * 64U, 0U);
  std::vector<std::uint32_t> inverted(stride, 0U);
  const std::uint64_t last_mask =
      (n & 63U) == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (n & 63U)) - 1U;
  for (std::size_t k = 0; k < count; ++k) {
    const auto words = pop.words(rows.empty() ? k : rows[k]);
    for (std::size_t w = 0; w < stride; ++w) {
      const std::uint64_t mask = w + 1 == stride ? last_mask : ~std::uint64_t{0};
      std::uint64_t bits = words[w];
      std::uint32_t* tally = ones.data() + w * 64U;
      if (std::popcount(bits) * 2 > std::popcount(mask)) {
        bits = ~bits & mask;
        tally = zeros.data() + w * 64U;
        ++inverted[w];
      }
      while (bits != 0U) {
        ++tally[std::countr_zero(bits)];
        bits &= bits - 1U;
      }
    }
  }
  std::vector<std::uint32_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = ones[i] + inverted[i >> 6U] - zeros[i];
  return out;
}

FrequencyUpdate update_frequencies(std::span<const std::uint32_t> ones, std::size_t mu,
                                   Borders borders) {
  require(mu >= 1, "update_frequencies: mu must be at least 1");
  const std::size_t n = ones.size();
  require(borders == Borders::unrestricted || n >= 2,
          "update_frequencies: restricted borders need n >= 2");
  const double lo = FrequencyVector::lower_bound(n, borders);
  const double hi = FrequencyVector::upper_bound(n, borders);
  const bool cap = borders == Borders::restricted;
  std::vector<double> values(n);
  BorderEvents events;
  events.per_position.assign(n, BorderEvents::Hit::none);
  const auto mu64 = static_cast<std::uint64_t>(mu);
  const auto n64 = static_cast<std::uint64_t>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t x = ones[i];
    require(x <= mu64, "update_frequencies: more ones than selected individuals");
    double v = static_cast<double>(x) / static_cast<double>(mu);
    // x/mu < 1/n  <=>  x n < mu;  x/mu > 1 - 1/n  <=>  (mu - x) n < mu.
    if (x * n64 < mu64) {
      events.per_position[i] = BorderEvents::Hit::lower;
      ++events.lower_hits;
      if (cap) v = lo;
    } else if ((mu64 - x) * n64 < mu64) {
      events.per_position[i] = BorderEvents::Hit::upper;
      ++events.upper_hits;
      if (cap) v = hi;
    }
    values[i] = v;
  }
  return {FrequencyVector(std::move(values), borders), std::move(events)};
}

FrequencyUpdate update_frequencies(const Population& selected, std::size_t mu, Borders borders,
                                   std::size_t n) {
  require(selected.size() == mu, "update_frequencies: |selected| must equal mu");
  require(selected.n() == n, "update_frequencies: individual length differs from n");
  const auto ones = count_ones(selected, {});
  return update_frequencies(ones, mu, borders);
}

bool is_stagnated(const FrequencyVector& p, const TargetString& target) noexcept {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double v = p[i];
    if ((v == 0.0 && target[i]) || (v == 1.0 && !target[i])) return true;
  }
  return false;
}

Simulator::Simulator(UmdaConfig cfg)
    : Simulator(cfg, FrequencyVector::uniform(cfg.n, cfg.borders)) {}

Simulator::Simulator(UmdaConfig cfg, FrequencyVector initial)
    : Simulator(cfg, std::move(initial), seed(cfg.master_seed, cfg.run_index)) {}

Simulator::Simulator(UmdaConfig cfg, FrequencyVector initial, Pcg32 rng)
    : cfg_(std::move(cfg)),
      rng_(rng),
      p_(std::move(initial)),
      telemetry_(cfg_.keep_generation_stats, cfg_.trajectory_every) {
  cfg_.validate();
  require(p_.size() == cfg_.n, "Simulator: initial frequencies have the wrong length");
  require(p_.borders() == cfg_.borders, "Simulator: initial frequencies use other borders");
  target_ = cfg_.resolved_target();
  pop_ = Population(cfg_.n, cfg_.lambda);
  last_ = record_generation(0, p_, events_, Population{});
  telemetry_.add(last_, p_);
}

const GenerationStats& Simulator::step() {
  ++generation_;
  PopulationSampler(p_).sample_into(pop_, rng_, target_);
  const auto fit = pop_.fitness();
  optimum_sampled_ = std::find(fit.begin(), fit.end(), cfg_.n) != fit.end();
  selected_ = select_mu_best_indices(fit, cfg_.mu, rng_);
  auto update = update_frequencies(count_ones(pop_, selected_), cfg_.mu, cfg_.borders);
  p_ = std::move(update.frequencies);
  events_ = std::move(update.events);
  last_ = record_generation(generation_, p_, events_, pop_);
  telemetry_.add(last_, p_);
  return last_;
}

RunResult Simulator::run() && {
  const std::size_t budget = cfg_.generation_budget();
  Verdict verdict = Verdict::budget_exhausted;
  if (cfg_.borders == Borders::unrestricted && stagnated()) {
    verdict = Verdict::stagnated;
  } else {
    while (generation_ < budget) {
      step();
      if (optimum_sampled_) {
        verdict = Verdict::optimum_found;
        break;
      }
      if (cfg_.borders == Borders::unrestricted && stagnated()) {
        verdict = Verdict::stagnated;
        break;
      }
    }
  }
  RunResult result;
  result.verdict = verdict;
  result.generations = generation_;
  result.evaluations = static_cast<std::uint64_t>(cfg_.lambda) * generation_;
  result.telemetry = std::move(telemetry_);
  result.final_frequencies = std::move(p_);
  return result;
}

StepResult step(const FrequencyVector& p, const UmdaConfig& cfg, Pcg32& rng) {
  UmdaConfig local = cfg;
  local.keep_generation_stats = false;
  local.trajectory_every = 0;
  Simulator sim(std::move(local), p, rng);
  const GenerationStats stats = sim.step();
  rng = sim.rng();
  return {sim.frequencies(), sim.population(), {sim.selected().begin(), sim.selected().end()},
          stats};
}

RunResult run(const UmdaConfig& cfg) { return Simulator(cfg).run(); }

RunResult run(const UmdaConfig& cfg, const FrequencyVector& initial) {
  return Simulator(cfg, initial).run();
}

}  // namespace umda
