#pragma once

/// @file telemetry.hpp
/// Per-generation measurements: sampling variance, potential, border hits.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "umda/bitmodel.hpp"

namespace umda {

/// Border events of one frequency update. A hit is a raw value x/mu strictly
/// below 1/n (lower) or strictly above 1 - 1/n (upper), counted per position,
/// independent of whether borders are enforced.
struct BorderEvents {
  enum class Hit : std::uint8_t { none, lower, upper };
  std::vector<Hit> per_position;
  std::size_t lower_hits = 0;
  std::size_t upper_hits = 0;
};

struct GenerationStats {
  std::size_t t = 0;
  double sigma_sq = 0.0;
  double phi = 0.0;
  std::size_t lower_border_hits = 0;
  std::size_t upper_border_hits = 0;
  double min_freq = 0.0;
  double max_freq = 0.0;
  std::size_t frequencies_at_lower = 0;
  std::size_t frequencies_at_upper = 0;
  std::size_t best_fitness = 0;
};

/// sum_i p_i (1 - p_i), the variance of an offspring's OneMax value.
double sigma_squared(const FrequencyVector& p) noexcept;

/// n - 1 - sum_i p_i: total distance of the frequencies from the upper border.
double potential_phi(const FrequencyVector& p) noexcept;

/// Assembles the record for generation t from the updated vector, the border
/// events of that update and the population it was computed from. `pop` may
/// be empty (t = 0, before anything was sampled); best_fitness is then 0.
GenerationStats record_generation(std::size_t t, const FrequencyVector& p_next,
                                  const BorderEvents& events, const Population& pop);

/// Accumulated telemetry of one run.
class RunTelemetry {
 public:
  struct Snapshot {
    std::size_t t;
    std::vector<double> frequencies;
  };

  /// `keep_generations` false drops per-generation records but keeps totals.
  /// `trajectory_every` k > 0 stores the full vector every k-th generation.
  explicit RunTelemetry(bool keep_generations = true, std::size_t trajectory_every = 0)
      : keep_generations_(keep_generations), trajectory_every_(trajectory_every) {}

  void add(const GenerationStats& stats, const FrequencyVector& p);

  const std::vector<GenerationStats>& per_generation() const noexcept { return per_generation_; }
  const std::vector<Snapshot>& trajectory() const noexcept { return trajectory_; }
  std::size_t total_lower_border_hits() const noexcept { return total_lower_; }
  std::size_t total_upper_border_hits() const noexcept { return total_upper_; }
  std::size_t generations_recorded() const noexcept { return recorded_; }

 private:
  bool keep_generations_;
  std::size_t trajectory_every_;
  std::vector<GenerationStats> per_generation_;
  std::vector<Snapshot> trajectory_;
  std::size_t total_lower_ = 0;
  std::size_t total_upper_ = 0;
  std::size_t recorded_ = 0;
};

/// Trajectory as text: one row per snapshot, `t;p_1;...;p_n`, each value in
/// its shortest round-trip decimal form.
void write_trajectory(std::ostream& out, const RunTelemetry& telemetry);
void write_trajectory(const std::string& path, const RunTelemetry& telemetry);

}  // namespace umda
