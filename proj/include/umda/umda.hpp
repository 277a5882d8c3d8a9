#pragma once

/// @file umda.hpp
/// The UMDA generation loop on OneMax_a.
///
/// One generation samples lambda offspring from the product distribution,
/// keeps the mu fittest (ties broken uniformly at random), and sets every
/// frequency to the relative number of ones among them. With restricted
/// borders the new frequencies are capped into [1/n, 1 - 1/n] (UMDA);
/// without, 0 and 1 are absorbing (UMDA*).
///
/// Generations are 1-indexed: generation g samples from p_{g-1} and produces
/// p_g. A run ends in the generation that first samples the target.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "umda/bitmodel.hpp"
#include "umda/rng.hpp"
#include "umda/telemetry.hpp"

namespace umda {

struct UmdaConfig {
  std::size_t n = 0;
  std::size_t mu = 0;
  std::size_t lambda = 0;
  Borders borders = Borders::restricted;
  /// Optimum of OneMax_a; empty means all ones.
  std::optional<TargetString> target;
  /// Defaults to 200 n.
  std::optional<std::size_t> max_generations;
  std::uint64_t master_seed = 0;
  std::uint64_t run_index = 0;
  /// Keep one GenerationStats per generation (totals are always kept).
  bool keep_generation_stats = true;
  /// Store the full frequency vector every k generations; 0 disables.
  std::size_t trajectory_every = 0;

  /// Throws ContractViolation unless 1 <= mu < lambda, n >= 1 (n >= 2 when
  /// restricted) and the target has length n.
  void validate() const;
  std::size_t generation_budget() const noexcept { return max_generations.value_or(200 * n); }
  TargetString resolved_target() const;
};

enum class Verdict { optimum_found, stagnated, budget_exhausted };

std::string_view to_string(Verdict verdict) noexcept;

struct RunResult {
  Verdict verdict = Verdict::budget_exhausted;
  /// Generation of the verdict (for optimum_found: the first generation that
  /// sampled the target).
  std::size_t generations = 0;
  /// lambda * generations.
  std::uint64_t evaluations = 0;
  RunTelemetry telemetry;
  FrequencyVector final_frequencies;
};

/// Indices of the mu fittest rows. Everything strictly fitter than the cutoff
/// fitness is taken; the remaining slots are a uniformly random subset of the
/// rows tied at the cutoff. Throws if mu > fitness.size() or mu == 0.
std::vector<std::size_t> select_mu_best_indices(std::span<const std::size_t> fitness,
                                                std::size_t mu, Pcg32& rng);

Population select_mu_best(const Population& pop, std::size_t mu, Pcg32& rng);

struct FrequencyUpdate {
  FrequencyVector frequencies;
  BorderEvents events;
};

/// Ones per position among `rows` of `pop` (all rows when `rows` is empty).
std::vector<std::uint32_t> count_ones(const Population& pop, std::span<const std::size_t> rows);

/// p_i = ones_i / mu, capped into the borders when restricted.
FrequencyUpdate update_frequencies(std::span<const std::uint32_t> ones, std::size_t mu,
                                   Borders borders);
/// Same, counting the ones of `selected` (|selected| must equal mu).
FrequencyUpdate update_frequencies(const Population& selected, std::size_t mu, Borders borders,
                                   std::size_t n);

/// True if some frequency is absorbed at the value opposite to the target
/// bit, so the target can never be sampled again.
bool is_stagnated(const FrequencyVector& p, const TargetString& target) noexcept;

/// Stateful simulator of one run; owns its generator and buffers.
class Simulator {
 public:
  explicit Simulator(UmdaConfig cfg);
  /// Starts from `initial` instead of the all-1/2 vector.
  Simulator(UmdaConfig cfg, FrequencyVector initial);
  Simulator(UmdaConfig cfg, FrequencyVector initial, Pcg32 rng);

  /// One full generation (sample, select, update). Returns its record.
  const GenerationStats& step();

  RunResult run() &&;

  std::size_t generation() const noexcept { return generation_; }
  const FrequencyVector& frequencies() const noexcept { return p_; }
  const Population& population() const noexcept { return pop_; }
  std::span<const std::size_t> selected() const noexcept { return selected_; }
  const BorderEvents& last_events() const noexcept { return events_; }
  const GenerationStats& last_stats() const noexcept { return last_; }
  bool optimum_sampled() const noexcept { return optimum_sampled_; }
  bool stagnated() const noexcept { return is_stagnated(p_, target_); }
  const UmdaConfig& config() const noexcept { return cfg_; }
  const TargetString& target() const noexcept { return target_; }
  const Pcg32& rng() const noexcept { return rng_; }
  const RunTelemetry& telemetry() const noexcept { return telemetry_; }

 private:
  UmdaConfig cfg_;
  TargetString target_;
  Pcg32 rng_;
  FrequencyVector p_;
  Population pop_;
  std::vector<std::size_t> selected_;
  BorderEvents events_;
  GenerationStats last_;
  RunTelemetry telemetry_;
  std::size_t generation_ = 0;
  bool optimum_sampled_ = false;
};

struct StepResult {
  FrequencyVector frequencies;
  Population population;
  std::vector<std::size_t> selected;
  GenerationStats stats;
};

/// One generation from `p` with the caller's generator (advanced in place).
StepResult step(const FrequencyVector& p, const UmdaConfig& cfg, Pcg32& rng);

/// Runs until the target is sampled, stagnation (UMDA* only) or the budget.
/// The generator is seed(cfg.master_seed, cfg.run_index).
RunResult run(const UmdaConfig& cfg);
RunResult run(const UmdaConfig& cfg, const FrequencyVector& initial);

}  // namespace umda
