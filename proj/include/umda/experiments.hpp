#pragma once

/// @file experiments.hpp
/// Lambda sweeps, scaling studies and phase-transition probes.
///
/// Every run in a study is seeded with seed(master_seed, derive_stream(setting,
/// run)), where `setting` is lambda for sweeps and n for scaling studies, and
/// aggregation folds results in run-index order. Results therefore do not
/// depend on the number of worker threads or on which other settings are part
/// of the study.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "umda/bitmodel.hpp"
#include "umda/umda.hpp"

namespace umda {

struct LambdaRange {
  std::size_t start = 14;
  std::size_t stop = 350;
  std::size_t step = 2;

  /// start, start + step, ... up to and including stop.
  std::vector<std::size_t> values() const;
};

/// mu as a function of lambda: `lambda/d` (floor) or a fixed value.
class MuRule {
 public:
  static MuRule ratio(std::size_t divisor);
  static MuRule fixed(std::size_t mu);
  /// Accepts "lambda/k" (k >= 2), "half" or a plain integer.
  static MuRule parse(std::string_view text);

  std::size_t apply(std::size_t lambda) const noexcept;
  std::string to_string() const;

 private:
  bool fixed_ = false;
  std::size_t value_ = 2;
};

/// mu as a function of n: ceil(c sqrt(n) ln n), ceil(c ln n) or a fixed value.
class SizeRule {
 public:
  enum class Kind { sqrt_log, log, fixed };

  SizeRule(Kind kind, double coefficient) : kind_(kind), coefficient_(coefficient) {}
  /// Accepts "sqrt-log:3", "log:5" or "fixed:40".
  static SizeRule parse(std::string_view text);

  std::size_t apply(std::size_t n) const;
  std::string to_string() const;

 private:
  Kind kind_;
  double coefficient_;
};

struct SweepConfig {
  std::size_t n = 2000;
  LambdaRange lambdas;
  MuRule mu_rule = MuRule::ratio(2);
  Borders borders = Borders::restricted;
  std::size_t runs_per_setting = 3000;
  std::uint64_t master_seed = 1;
  std::optional<std::size_t> max_generations;
  /// Written by run_sweep when non-empty.
  std::string output_path;
  bool header = false;
  /// Worker threads; 0 means hardware concurrency.
  unsigned threads = 0;

  /// Throws ConfigError on inconsistent settings (step 0, mu >= lambda, ...).
  void validate() const;
};

/// Parses `key = value` lines ('#' starts a comment) into a config. Keys:
/// n, lambda_start, lambda_stop, lambda_step, mu_rule, borders,
/// runs_per_setting, master_seed, max_generations, output_path, header,
/// threads. Unknown keys and malformed values throw ConfigError.
std::map<std::string, std::string> parse_key_values(std::istream& in);
std::map<std::string, std::string> read_key_value_file(const std::string& path);
SweepConfig sweep_config_from(const std::map<std::string, std::string>& kv,
                              SweepConfig base = {});

struct SweepRow {
  std::size_t lambda = 0;
  /// Means over runs that found the optimum.
  double avg_evaluations = 0.0;
  double avg_lower_border_hits = 0.0;
  double success_fraction = 0.0;
  double avg_generations = 0.0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs every lambda of the sweep and aggregates; writes `output_path` if set.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg, const ProgressFn& progress = {});

/// Semicolon-separated rows: lambda;avg_evaluations;avg_lower_border_hits;
/// success_fraction;avg_generations with decimals from format_decimal().
std::string format_csv(std::span<const SweepRow> rows, bool header = false);
void emit_csv(std::span<const SweepRow> rows, const std::string& path, bool header = false);
/// Inverse of format_csv; a header line is skipped.
std::vector<SweepRow> parse_csv(std::string_view text);
std::vector<SweepRow> read_csv(const std::string& path);

struct ScalingPoint {
  std::size_t n = 0;
  std::size_t mu = 0;
  std::size_t lambda = 0;
  /// Medians over all runs; censored runs count with the full budget.
  double median_generations = 0.0;
  double median_evaluations = 0.0;
  double success_fraction = 0.0;
};

struct ScalingStudy {
  std::vector<ScalingPoint> points;
  /// Least-squares slope of ln(median generations) against ln(n); absent
  /// with fewer than two distinct sizes.
  std::optional<double> slope;
};

struct ScalingConfig {
  std::vector<std::size_t> n_values;
  SizeRule mu_rule{SizeRule::Kind::sqrt_log, 3.0};
  /// lambda = ceil(lambda_factor * mu).
  double lambda_factor = 2.0;
  Borders borders = Borders::restricted;
  std::size_t runs = 50;
  std::uint64_t master_seed = 1;
  std::optional<std::size_t> max_generations;
  unsigned threads = 0;
};

ScalingStudy run_scaling_study(const ScalingConfig& cfg);

std::string format_scaling(const ScalingStudy& study, bool header = false);

/// Least-squares slope of ln y against ln x.
std::optional<double> loglog_slope(std::span<const double> x, std::span<const double> y);

struct PhaseOutcome {
  std::size_t mu = 0;
  std::size_t lambda = 0;
  double stagnated_fraction = 0.0;
  double success_fraction = 0.0;
  double budget_fraction = 0.0;
};

struct PhaseProbe {
  PhaseOutcome small;
  PhaseOutcome large;
};

struct PhaseConfig {
  std::size_t n = 500;
  std::size_t mu_small = 0;
  std::size_t mu_large = 0;
  double lambda_factor = 2.0;
  Borders borders = Borders::unrestricted;
  std::size_t runs = 100;
  std::uint64_t master_seed = 1;
  std::optional<std::size_t> max_generations;
  unsigned threads = 0;
};

PhaseProbe run_phase_transition_probe(const PhaseConfig& cfg);

std::string format_phase(const PhaseProbe& probe, bool header = false);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::string& path, std::string_view text);

/// Runs body(0..count-1) on `threads` workers (0 = hardware concurrency).
/// Exceptions from any task are rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

/// Centered moving average keeping only full windows (size - window + 1 values).
std::vector<double> moving_average(std::span<const double> values, std::size_t window);

/// True if some interior local minimum is followed by an interior local
/// maximum (strict comparisons with both neighbours).
bool has_min_then_max(std::span<const double> values);

}  // namespace umda
