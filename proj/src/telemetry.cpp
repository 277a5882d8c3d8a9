#include "umda/telemetry.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <string_view>

#include "umda/error.hpp"

namespace umda {

double sigma_squared(const FrequencyVector& p) noexcept {
  double sum = 0.0;
  for (const double v : p.values()) sum += v * (1.0 - v);
  return sum;
}

double potential_phi(const FrequencyVector& p) noexcept {
  double sum = 0.0;
  for (const double v : p.values()) sum += v;
  return static_cast<double>(p.size()) - 1.0 - sum;
}

GenerationStats record_generation(std::size_t t, const FrequencyVector& p_next,
                                  const BorderEvents& events, const Population& pop) {
  GenerationStats s;
  s.t = t;
  s.sigma_sq = sigma_squared(p_next);
  s.phi = potential_phi(p_next);
  s.lower_border_hits = events.lower_hits;
  s.upper_border_hits = events.upper_hits;
  const auto values = p_next.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min_freq = *lo;
  s.max_freq = *hi;
  const double lower = p_next.lower();
  const double upper = p_next.upper();
  for (const double v : values) {
    if (v == lower) ++s.frequencies_at_lower;
    if (v == upper) ++s.frequencies_at_upper;
  }
  const auto fit = pop.fitness();
  s.best_fitness = fit.empty() ? 0 : *std::max_element(fit.begin(), fit.end());
  return s;
}

void RunTelemetry::add(const GenerationStats& stats, const FrequencyVector& p) {
  total_lower_ += stats.lower_border_hits;
  total_upper_ += stats.upper_border_hits;
  if (keep_generations_) per_generation_.push_back(stats);
  if (trajectory_every_ > 0 && stats.t % trajectory_every_ == 0) {
    trajectory_.push_back({stats.t, {p.values().begin(), p.values().end()}});
  }
  ++recorded_;
}

void write_trajectory(std::ostream& out, const RunTelemetry& telemetry) {
  for (const auto& snap : telemetry.trajectory()) {
    out << snap.t;
    for (const double v : snap.frequencies) {
      // Shortest representation that parses back to the same double.
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out << ';' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

void write_trajectory(const std::string& path, const RunTelemetry& telemetry) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_trajectory(out, telemetry);
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace umda
