#include "umda/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "umda/error.hpp"
#include "umda/format.hpp"

namespace umda {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view text, std::string_view key) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

double parse_double(std::string_view text, std::string_view key) {
  const std::string s(trim(text));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ConfigError("invalid value '" + s + "' for " + std::string(key));
  }
  return v;
}

bool parse_bool(std::string_view text, std::string_view key) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("invalid boolean '" + std::string(text) + "' for " + std::string(key));
}

struct RunOutcome {
  Verdict verdict = Verdict::budget_exhausted;
  std::size_t generations = 0;
  std::uint64_t evaluations = 0;
  std::size_t lower_hits = 0;
};

RunOutcome run_one(const UmdaConfig& cfg) {
  const auto result = run(cfg);
  return {result.verdict, result.generations, result.evaluations,
          result.telemetry.total_lower_border_hits()};
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::size_t lambda_for(std::size_t mu, double factor) {
  return static_cast<std::size_t>(std::ceil(factor * static_cast<double>(mu)));
}

}  // namespace

std::vector<std::size_t> LambdaRange::values() const {
  std::vector<std::size_t> out;
  if (step == 0) return out;
  for (std::size_t l = start; l <= stop; l += step) out.push_back(l);
  return out;
}

MuRule MuRule::ratio(std::size_t divisor) {
  MuRule r;
  r.fixed_ = false;
  r.value_ = divisor;
  return r;
}

MuRule MuRule::fixed(std::size_t mu) {
  MuRule r;
  r.fixed_ = true;
  r.value_ = mu;
  return r;
}

MuRule MuRule::parse(std::string_view text) {
  text = trim(text);
  if (text == "half") return ratio(2);
  if (text.starts_with("lambda/")) {
    const auto d = parse_number<std::size_t>(text.substr(7), "mu_rule");
    if (d < 2) throw ConfigError("mu_rule divisor must be at least 2");
    return ratio(d);
  }
  if (text.starts_with("fixed:")) text.remove_prefix(6);
  return fixed(parse_number<std::size_t>(text, "mu_rule"));
}

std::size_t MuRule::apply(std::size_t lambda) const noexcept {
  return fixed_ ? value_ : lambda / value_;
}

std::string MuRule::to_string() const {
  return fixed_ ? std::to_string(value_) : "lambda/" + std::to_string(value_);
}

SizeRule SizeRule::parse(std::string_view text) {
  text = trim(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("size rule needs the form kind:value");
  const auto kind = text.substr(0, colon);
  const double c = parse_double(text.substr(colon + 1), "size rule");
  if (!(c > 0.0)) throw ConfigError("size rule coefficient must be positive");
  if (kind == "sqrt-log") return {Kind::sqrt_log, c};
  if (kind == "log") return {Kind::log, c};
  if (kind == "fixed") return {Kind::fixed, c};
  throw ConfigError("unknown size rule '" + std::string(kind) + "'");
}

std::size_t SizeRule::apply(std::size_t n) const {
  const auto x = static_cast<double>(n);
  switch (kind_) {
    case Kind::sqrt_log:
      return static_cast<std::size_t>(std::ceil(coefficient_ * std::sqrt(x) * std::log(x)));
    case Kind::log:
      return static_cast<std::size_t>(std::ceil(coefficient_ * std::log(x)));
    case Kind::fixed:
      break;
  }
  return static_cast<std::size_t>(coefficient_);
}

std::string SizeRule::to_string() const {
  const char* name = kind_ == Kind::sqrt_log ? "sqrt-log" : kind_ == Kind::log ? "log" : "fixed";
  return std::string(name) + ":" + format_decimal(coefficient_);
}

void SweepConfig::validate() const {
  if (n < 2) throw ConfigError("n must be at least 2");
  if (lambdas.step < 1) throw ConfigError("lambda_step must be at least 1");
  if (lambdas.start > lambdas.stop) throw ConfigError("lambda_start exceeds lambda_stop");
  if (runs_per_setting < 1) throw ConfigError("runs_per_setting must be at least 1");
  if (max_generations && *max_generations < 1) throw ConfigError("max_generations must be positive");
  for (const auto lambda : lambdas.values()) {
    const auto mu = mu_rule.apply(lambda);
    if (mu < 1 || mu >= lambda) {
      throw ConfigError("mu(" + std::to_string(lambda) + ") = " + std::to_string(mu) +
                        " violates 1 <= mu < lambda");
    }
  }
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    }
    const auto key = trim(view.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
    out[std::string(key)] = std::string(trim(view.substr(eq + 1)));
  }
  return out;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return parse_key_values(in);
}

SweepConfig sweep_config_from(const std::map<std::string, std::string>& kv, SweepConfig base) {
  for (const auto& [key, value] : kv) {
    if (key == "n") {
      base.n = parse_number<std::size_t>(value, key);
    } else if (key == "lambda_start") {
      base.lambdas.start = parse_number<std::size_t>(value, key);
    } else if (key == "lambda_stop") {
      base.lambdas.stop = parse_number<std::size_t>(value, key);
    } else if (key == "lambda_step") {
      base.lambdas.step = parse_number<std::size_t>(value, key);
    } else if (key == "mu_rule") {
      base.mu_rule = MuRule::parse(value);
    } else if (key == "borders") {
      base.borders = parse_borders(trim(value));
    } else if (key == "runs_per_setting") {
      base.runs_per_setting = parse_number<std::size_t>(value, key);
    } else if (key == "master_seed") {
      base.master_seed = parse_number<std::uint64_t>(value, key);
    } else if (key == "max_generations") {
      base.max_generations = parse_number<std::size_t>(value, key);
    } else if (key == "output_path") {
      base.output_path = value;
    } else if (key == "header") {
      base.header = parse_bool(value, key);
    } else if (key == "threads") {
      base.threads = parse_number<unsigned>(value, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return base;
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const auto lambdas = cfg.lambdas.values();
  const std::size_t runs = cfg.runs_per_setting;
  const std::size_t total = lambdas.size() * runs;
  std::vector<RunOutcome> outcomes(total);
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  parallel_for(total, cfg.threads, [&](std::size_t task) {
    const std::size_t lambda = lambdas[task / runs];
    const std::size_t r = task % runs;
    UmdaConfig run_cfg;
    run_cfg.n = cfg.n;
    run_cfg.lambda = lambda;
    run_cfg.mu = cfg.mu_rule.apply(lambda);
    run_cfg.borders = cfg.borders;
    run_cfg.max_generations = cfg.max_generations;
    run_cfg.master_seed = cfg.master_seed;
    run_cfg.run_index = derive_stream(lambda, r);
    run_cfg.keep_generation_stats = false;
    outcomes[task] = run_one(run_cfg);
    const auto finished = done.fetch_add(1) + 1;
    if (progress) {
      const std::lock_guard lock(progress_mutex);
      progress(finished, total);
    }
  });

  std::vector<SweepRow> rows;
  rows.reserve(lambdas.size());
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    SweepRow row;
    row.lambda = lambdas[li];
    std::size_t successes = 0;
    double evals = 0.0;
    double hits = 0.0;
    double gens = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
      const auto& o = outcomes[li * runs + r];
      if (o.verdict != Verdict::optimum_found) continue;
      ++successes;
      evals += static_cast<double>(o.evaluations);
      hits += static_cast<double>(o.lower_hits);
      gens += static_cast<double>(o.generations);
    }
    row.success_fraction = static_cast<double>(successes) / static_cast<double>(runs);
    if (successes > 0) {
      const auto s = static_cast<double>(successes);
      row.avg_evaluations = evals / s;
      row.avg_lower_border_hits = hits / s;
      row.avg_generations = gens / s;
    }
    rows.push_back(row);
  }
  if (!cfg.output_path.empty()) emit_csv(rows, cfg.output_path, cfg.header);
  return rows;
}

std::string format_csv(std::span<const SweepRow> rows, bool header) {
  std::string out;
  if (header) out += "lambda;avg_evaluations;avg_lower_border_hits;success_fraction;avg_generations\n";
  for (const auto& r : rows) {
    out += std::to_string(r.lambda);
    for (const double v :
         {r.avg_evaluations, r.avg_lower_border_hits, r.success_fraction, r.avg_generations}) {
      out += ';';
      out += format_decimal(v);
    }
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("write to '" + path + "' failed");
}

void emit_csv(std::span<const SweepRow> rows, const std::string& path, bool header) {
  write_text_file(path, format_csv(rows, header));
}

std::vector<SweepRow> parse_csv(std::string_view text) {
  std::vector<SweepRow> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (line.empty() || line.starts_with("lambda")) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
      const auto semi = line.find(';', start);
      fields.push_back(line.substr(start, semi == std::string_view::npos ? line.size() - start
                                                                         : semi - start));
      if (semi == std::string_view::npos) break;
      start = semi + 1;
    }
    if (fields.size() != 5) throw ConfigError("expected 5 fields per row, got " +
                                              std::to_string(fields.size()));
    SweepRow row;
    row.lambda = parse_number<std::size_t>(fields[0], "lambda");
    row.avg_evaluations = parse_double(fields[1], "avg_evaluations");
    row.avg_lower_border_hits = parse_double(fields[2], "avg_lower_border_hits");
    row.success_fraction = parse_double(fields[3], "success_fraction");
    row.avg_generations = parse_double(fields[4], "avg_generations");
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::optional<double> loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

ScalingStudy run_scaling_study(const ScalingConfig& cfg) {
  if (cfg.n_values.empty()) throw ConfigError("scaling study needs at least one n");
  if (!std::is_sorted(cfg.n_values.begin(), cfg.n_values.end())) {
    throw ConfigError("scaling study needs monotone n values");
  }
  if (cfg.runs < 1) throw ConfigError("runs must be at least 1");
  const std::size_t runs = cfg.runs;
  std::vector<UmdaConfig> settings;
  for (const auto n : cfg.n_values) {
    UmdaConfig c;
    c.n = n;
    c.mu = cfg.mu_rule.apply(n);
    c.lambda = lambda_for(c.mu, cfg.lambda_factor);
    c.borders = cfg.borders;
    c.max_generations = cfg.max_generations;
    c.master_seed = cfg.master_seed;
    c.keep_generation_stats = false;
    if (c.mu < 1 || c.mu >= c.lambda) throw ConfigError("scaling rule gives mu >= lambda");
    settings.push_back(c);
  }
  std::vector<RunOutcome> outcomes(settings.size() * runs);
  parallel_for(outcomes.size(), cfg.threads, [&](std::size_t task) {
    UmdaConfig c = settings[task / runs];
    c.run_index = derive_stream(c.n, task % runs);
    outcomes[task] = run_one(c);
  });

  ScalingStudy study;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t s = 0; s < settings.size(); ++s) {
    ScalingPoint pt;
    pt.n = settings[s].n;
    pt.mu = settings[s].mu;
    pt.lambda = settings[s].lambda;
    std::vector<double> gens;
    std::vector<double> evals;
    std::size_t successes = 0;
    for (std::size_t r = 0; r < runs; ++r) {
      const auto& o = outcomes[s * runs + r];
      gens.push_back(static_cast<double>(o.generations));
      evals.push_back(static_cast<double>(o.evaluations));
      if (o.verdict == Verdict::optimum_found) ++successes;
    }
    pt.median_generations = median(gens);
    pt.median_evaluations = median(evals);
    pt.success_fraction = static_cast<double>(successes) / static_cast<double>(runs);
    study.points.push_back(pt);
    if (xs.empty() || xs.back() != static_cast<double>(pt.n)) {
      xs.push_back(static_cast<double>(pt.n));
      ys.push_back(std::max(pt.median_generations, 1.0));
    }
  }
  study.slope = loglog_slope(xs, ys);
  return study;
}

std::string format_scaling(const ScalingStudy& study, bool header) {
  std::string out;
  if (header) out += "n;mu;lambda;median_generations;median_evaluations;success_fraction\n";
  for (const auto& p : study.points) {
    out += std::to_string(p.n) + ';' + std::to_string(p.mu) + ';' + std::to_string(p.lambda) +
           ';' + format_decimal(p.median_generations) + ';' +
           format_decimal(p.median_evaluations) + ';' + format_decimal(p.success_fraction) + '\n';
  }
  return out;
}

PhaseProbe run_phase_transition_probe(const PhaseConfig& cfg) {
  if (!(cfg.mu_small < cfg.mu_large)) throw ConfigError("phase probe needs mu_small < mu_large");
  if (cfg.mu_small < 1) throw ConfigError("phase probe needs mu_small >= 1");
  if (cfg.runs < 1) throw ConfigError("runs must be at least 1");
  const std::size_t runs = cfg.runs;
  std::array<UmdaConfig, 2> settings;
  for (std::size_t s = 0; s < 2; ++s) {
    auto& c = settings[s];
    c.n = cfg.n;
    c.mu = s == 0 ? cfg.mu_small : cfg.mu_large;
    c.lambda = lambda_for(c.mu, cfg.lambda_factor);
    c.borders = cfg.borders;
    c.max_generations = cfg.max_generations;
    c.master_seed = cfg.master_seed;
    c.keep_generation_stats = false;
    if (c.mu >= c.lambda) throw ConfigError("phase probe: lambda_factor gives mu >= lambda");
  }
  std::vector<RunOutcome> outcomes(2 * runs);
  parallel_for(outcomes.size(), cfg.threads, [&](std::size_t task) {
    UmdaConfig c = settings[task / runs];
    c.run_index = derive_stream(c.mu, task % runs);
    outcomes[task] = run_one(c);
  });
  auto summarize = [&](std::size_t s) {
    PhaseOutcome o;
    o.mu = settings[s].mu;
    o.lambda = settings[s].lambda;
    std::size_t stag = 0;
    std::size_t ok = 0;
    std::size_t budget = 0;
    for (std::size_t r = 0; r < runs; ++r) {
      switch (outcomes[s * runs + r].verdict) {
        case Verdict::stagnated:
          ++stag;
          break;
        case Verdict::optimum_found:
          ++ok;
          break;
        case Verdict::budget_exhausted:
          ++budget;
          break;
      }
    }
    const auto total = static_cast<double>(runs);
    o.stagnated_fraction = static_cast<double>(stag) / total;
    o.success_fraction = static_cast<double>(ok) / total;
    o.budget_fraction = static_cast<double>(budget) / total;
    return o;
  };
  return {summarize(0), summarize(1)};
}

std::string format_phase(const PhaseProbe& probe, bool header) {
  std::string out;
  if (header) out += "mu;lambda;stagnated_fraction;success_fraction;budget_fraction\n";
  for (const auto* o : {&probe.small, &probe.large}) {
    out += std::to_string(o->mu) + ';' + std::to_string(o->lambda) + ';' +
           format_decimal(o->stagnated_fraction) + ';' + format_decimal(o->success_fraction) +
           ';' + format_decimal(o->budget_fraction) + '\n';
  }
  return out;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return 0.0;
  auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0U);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const auto n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window) {
  std::vector<double> out;
  if (window == 0 || values.size() < window) return out;
  for (std::size_t i = 0; i + window <= values.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < window; ++k) s += values[i + k];
    out.push_back(s / static_cast<double>(window));
  }
  return out;
}

bool has_min_then_max(std::span<const double> values) {
  bool seen_min = false;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    const double prev = values[i - 1];
    const double cur = values[i];
    const double next = values[i + 1];
    if (cur < prev && cur < next) seen_min = true;
    if (seen_min && cur > prev && cur > next) return true;
  }
  return false;
}

}  // namespace umda
