// Command-line front end for the UMDA experiment harness.
//
// Exit codes: 0 success, 1 configuration error, 2 I/O error,
// 3 verification failure.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "umda/error.hpp"
#include "umda/experiments.hpp"
#include "umda/format.hpp"
#include "umda/umda.hpp"
#include "umda/verification.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitVerify = 3;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out;
  std::string config;
};

struct SweepOptions {
  std::optional<std::size_t> n;
  std::optional<std::size_t> lambda_start;
  std::optional<std::size_t> lambda_stop;
  std::optional<std::size_t> lambda_step;
  std::optional<std::string> mu_rule;
  std::optional<std::string> borders;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> max_generations;
  std::string preset = "full";
  bool header = false;
  bool progress = false;
};

struct ScalingOptions {
  std::vector<std::size_t> n_values{64, 256, 1024};
  std::string mu_rule = "sqrt-log:3";
  double lambda_factor = 2.0;
  std::string borders = "restricted";
  std::size_t runs = 50;
  std::optional<std::size_t> max_generations;
  bool header = false;
};

struct PhaseOptions {
  std::size_t n = 500;
  std::optional<std::size_t> mu_small;
  std::optional<std::size_t> mu_large;
  double lambda_factor = 2.0;
  std::size_t runs = 100;
  std::optional<std::size_t> max_generations;
  bool header = false;
};

struct RunOptions {
  std::size_t n = 100;
  std::size_t mu = 0;
  std::size_t lambda = 0;
  std::string borders = "restricted";
  std::uint64_t run_index = 0;
  std::optional<std::size_t> max_generations;
  std::size_t trajectory_every = 0;
};

struct VerifyOptions {
  bool all = false;
  std::string scratch = "umda_verify_scratch";
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    umda::write_text_file(path, text);
  }
}

umda::SweepConfig build_sweep(const Globals& g, const SweepOptions& o) {
  umda::SweepConfig cfg;
  if (o.preset == "desk") {
    cfg.n = 500;
    cfg.lambdas = {10, 150, 4};
    cfg.runs_per_setting = 200;
  } else if (o.preset != "full") {
    throw umda::ConfigError("unknown preset '" + o.preset + "'");
  }
  if (!g.config.empty()) cfg = umda::sweep_config_from(umda::read_key_value_file(g.config), cfg);
  if (o.n) cfg.n = *o.n;
  if (o.lambda_start) cfg.lambdas.start = *o.lambda_start;
  if (o.lambda_stop) cfg.lambdas.stop = *o.lambda_stop;
  if (o.lambda_step) cfg.lambdas.step = *o.lambda_step;
  if (o.mu_rule) cfg.mu_rule = umda::MuRule::parse(*o.mu_rule);
  if (o.borders) cfg.borders = umda::parse_borders(*o.borders);
  if (o.runs) cfg.runs_per_setting = *o.runs;
  if (o.max_generations) cfg.max_generations = *o.max_generations;
  if (o.header) cfg.header = true;
  if (g.seed) cfg.master_seed = *g.seed;
  if (g.threads) cfg.threads = *g.threads;
  if (!g.out.empty()) cfg.output_path = g.out;
  cfg.validate();
  return cfg;
}

// Seed and thread count for the non-sweep commands: flags win over the config file.
std::pair<std::uint64_t, unsigned> seed_and_threads(const Globals& g) {
  umda::SweepConfig base;
  if (!g.config.empty()) base = umda::sweep_config_from(umda::read_key_value_file(g.config), base);
  return {g.seed.value_or(base.master_seed), g.threads.value_or(base.threads)};
}

int cmd_sweep(const Globals& g, const SweepOptions& o) {
  const auto cfg = build_sweep(g, o);
  umda::ProgressFn progress;
  if (o.progress) {
    progress = [](std::size_t done, std::size_t total) {
      if (done % 100 == 0 || done == total) std::fprintf(stderr, "\r%zu/%zu runs", done, total);
      if (done == total) std::fprintf(stderr, "\n");
    };
  }
  const auto rows = umda::run_sweep(cfg, progress);
  if (cfg.output_path.empty()) std::cout << umda::format_csv(rows, cfg.header);
  return 0;
}

int cmd_scaling(const Globals& g, const ScalingOptions& o) {
  umda::ScalingConfig cfg;
  cfg.n_values = o.n_values;
  cfg.mu_rule = umda::SizeRule::parse(o.mu_rule);
  cfg.lambda_factor = o.lambda_factor;
  cfg.borders = umda::parse_borders(o.borders);
  cfg.runs = o.runs;
  cfg.max_generations = o.max_generations;
  std::tie(cfg.master_seed, cfg.threads) = seed_and_threads(g);
  const auto study = umda::run_scaling_study(cfg);
  emit(g.out, umda::format_scaling(study, o.header));
  std::cerr << "slope of median generations vs n: "
            << (study.slope ? umda::format_decimal(*study.slope) : "absent") << '\n';
  return 0;
}

int cmd_phase(const Globals& g, const PhaseOptions& o) {
  umda::PhaseConfig cfg;
  cfg.n = o.n;
  cfg.mu_small = o.mu_small.value_or(umda::SizeRule(umda::SizeRule::Kind::log, 3.0).apply(o.n));
  cfg.mu_large =
      o.mu_large.value_or(umda::SizeRule(umda::SizeRule::Kind::sqrt_log, 3.0).apply(o.n));
  cfg.lambda_factor = o.lambda_factor;
  cfg.runs = o.runs;
  cfg.max_generations = o.max_generations;
  std::tie(cfg.master_seed, cfg.threads) = seed_and_threads(g);
  emit(g.out, umda::format_phase(umda::run_phase_transition_probe(cfg), o.header));
  return 0;
}

int cmd_run(const Globals& g, const RunOptions& o) {
  umda::UmdaConfig cfg;
  cfg.n = o.n;
  cfg.mu = o.mu;
  cfg.lambda = o.lambda == 0 ? 2 * o.mu : o.lambda;
  cfg.borders = umda::parse_borders(o.borders);
  cfg.master_seed = seed_and_threads(g).first;
  cfg.run_index = o.run_index;
  cfg.max_generations = o.max_generations;
  cfg.keep_generation_stats = false;
  cfg.trajectory_every = o.trajectory_every;
  try {
    cfg.validate();
  } catch (const umda::ContractViolation& e) {
    throw umda::ConfigError(e.what());
  }
  const auto result = umda::run(cfg);
  std::cerr << "verdict " << umda::to_string(result.verdict) << ", generations "
            << result.generations << ", evaluations " << result.evaluations
            << ", lower border hits " << result.telemetry.total_lower_border_hits() << '\n';
  if (o.trajectory_every > 0) {
    std::ostringstream text;
    umda::write_trajectory(text, result.telemetry);
    emit(g.out, text.str());
  }
  return 0;
}

int cmd_verify(const Globals& g, const VerifyOptions& o) {
  namespace v = umda::verify;
  const auto [seed, threads] = seed_and_threads(g);
  std::vector<v::CheckResult> results = v::run_quick(seed);
  if (o.all) {
    results.push_back(v::sqrt_n_generation_scaling(seed, threads));
    results.push_back(v::linear_generation_scaling(seed, threads));
    results.push_back(v::unrestricted_phase_transition(seed, threads));
    results.push_back(v::lambda_sweep_shape(seed, threads, g.out));
  }
  results.push_back(v::rerun_determinism(o.scratch, seed));
  bool ok = true;
  for (const auto& r : results) {
    std::cout << v::describe(r) << '\n';
    ok = ok && r.passed;
  }
  return ok ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UMDA on OneMax: sweeps, scaling studies, phase probes and verification"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
  app.add_option("--out", g.out, "Output file ('-' or empty for stdout)");
  app.add_option("--config", g.config, "key = value configuration file");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Average runtime and border hits over a lambda range");
  sweep_cmd->add_option("--preset", sweep.preset, "full (n=2000, 14..350/2, 3000 runs) or desk")
      ->capture_default_str();
  sweep_cmd->add_option("--n", sweep.n, "Problem size");
  sweep_cmd->add_option("--lambda-start", sweep.lambda_start);
  sweep_cmd->add_option("--lambda-stop", sweep.lambda_stop);
  sweep_cmd->add_option("--lambda-step", sweep.lambda_step);
  sweep_cmd->add_option("--mu-rule", sweep.mu_rule, "lambda/2, lambda/k or a fixed integer");
  sweep_cmd->add_option("--borders", sweep.borders, "restricted | unrestricted");
  sweep_cmd->add_option("--runs", sweep.runs, "Runs per lambda");
  sweep_cmd->add_option("--max-generations", sweep.max_generations);
  sweep_cmd->add_flag("--header", sweep.header, "Write a header line");
  sweep_cmd->add_flag("--progress", sweep.progress, "Report progress on stderr");

  ScalingOptions scaling;
  auto* scaling_cmd = app.add_subcommand("scaling", "Median generations across problem sizes");
  scaling_cmd->add_option("--n-values", scaling.n_values)->delimiter(',')->capture_default_str();
  scaling_cmd->add_option("--mu-rule", scaling.mu_rule, "sqrt-log:c, log:c or fixed:m")
      ->capture_default_str();
  scaling_cmd->add_option("--lambda-factor", scaling.lambda_factor)->capture_default_str();
  scaling_cmd->add_option("--borders", scaling.borders)->capture_default_str();
  scaling_cmd->add_option("--runs", scaling.runs)->capture_default_str();
  scaling_cmd->add_option("--max-generations", scaling.max_generations);
  scaling_cmd->add_flag("--header", scaling.header);

  PhaseOptions phase;
  auto* phase_cmd = app.add_subcommand("phase", "UMDA* stagnation below and above the transition");
  phase_cmd->add_option("--n", phase.n)->capture_default_str();
  phase_cmd->add_option("--mu-small", phase.mu_small, "Default ceil(3 ln n)");
  phase_cmd->add_option("--mu-large", phase.mu_large, "Default ceil(3 sqrt(n) ln n)");
  phase_cmd->add_option("--lambda-factor", phase.lambda_factor)->capture_default_str();
  phase_cmd->add_option("--runs", phase.runs)->capture_default_str();
  phase_cmd->add_option("--max-generations", phase.max_generations);
  phase_cmd->add_flag("--header", phase.header);

  RunOptions single;
  auto* run_cmd = app.add_subcommand("run", "One run; optionally export the frequency trajectory");
  run_cmd->add_option("--n", single.n)->capture_default_str();
  run_cmd->add_option("--mu", single.mu)->required();
  run_cmd->add_option("--lambda", single.lambda, "Default 2 mu");
  run_cmd->add_option("--borders", single.borders)->capture_default_str();
  run_cmd->add_option("--run-index", single.run_index)->capture_default_str();
  run_cmd->add_option("--max-generations", single.max_generations);
  run_cmd->add_option("--trajectory-every", single.trajectory_every,
                      "Write the frequency vector every k generations");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run the probabilistic checks");
  verify_cmd->add_flag("--all", verify.all, "Include the multi-minute simulation checks");
  verify_cmd->add_option("--scratch", verify.scratch, "Directory for determinism reruns")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sweep_cmd) return cmd_sweep(g, sweep);
    if (*scaling_cmd) return cmd_scaling(g, scaling);
    if (*phase_cmd) return cmd_phase(g, phase);
    if (*run_cmd) return cmd_run(g, single);
    if (*verify_cmd) return cmd_verify(g, verify);
  } catch (const umda::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const umda::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitConfig;
}
