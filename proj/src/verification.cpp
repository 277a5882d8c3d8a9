#include "umda/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "umda/experiments.hpp"
#include "umda/level_decomposition.hpp"
#include "umda/oracles.hpp"
#include "umda/umda.hpp"

namespace umda::verify {

namespace {

template <class Body>
CheckResult timed(int id, std::string name, double limit, Body&& body) {
  CheckResult r;
  r.id = id;
  r.name = std::move(name);
  r.time_limit = limit;
  const auto start = std::chrono::steady_clock::now();
  std::string measured;
  const bool ok = body(measured);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.measured = std::move(measured);
  r.passed = ok && r.seconds < limit;
  if (ok && !r.passed) r.measured += " [time limit exceeded]";
  return r;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> random_probabilities(Pcg32& rng, std::size_t m, double lo, double hi) {
  std::vector<double> p(m);
  for (auto& v : p) v = lo + (hi - lo) * rng.uniform01();
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

constexpr std::size_t kStepN = 50;
constexpr std::size_t kStepMu = 50;
constexpr std::size_t kStepLambda = 100;
constexpr std::size_t kStepTrials = 10'000;

}  // namespace

CheckResult capped_binomial_bound() {
  return timed(1, "capped binomial expectation bound", 1.0, [](std::string& out) {
    double worst = INFINITY;
    std::size_t cases = 0;
    for (std::size_t d = 1; d <= 12; ++d) {
      for (std::size_t c = 1; c <= d; ++c) {
        for (int k = 1; k <= 19; ++k) {
          const double p = k / 20.0;
          worst = std::min(worst, expected_min_capped_binomial(c, d, p) - capped_binomial_lower_bound(c, d, p));
          ++cases;
        }
      }
    }
    out = std::to_string(cases) + " cases, min slack " + fmt(worst);
    return worst >= -1e-12;
  });
}

CheckResult poisson_binomial_oracle(std::uint64_t seed) {
  return timed(2, "Poisson binomial pmf oracle", 10.0, [seed](std::string& out) {
    Pcg32 rng = umda::seed(seed, 2);
    double norm_err = 0.0;
    double mean_err = 0.0;
    double var_err = 0.0;
    std::size_t unimodal_failures = 0;
    // Rounding slack for neighbour comparisons near the mode.
    constexpr double kSlack = 1e-12;
    for (int inst = 0; inst < 500; ++inst) {
      const std::size_t m = 1 + rng.bounded(200);
      const auto table = poisson_binomial_pmf(random_probabilities(rng, m, 0.0, 1.0));
      const auto mom = pmf_moments(table.pmf);
      norm_err = std::max(norm_err, std::fabs(mom.total - 1.0));
      mean_err = std::max(mean_err, std::fabs(mom.mean - table.mean));
      var_err = std::max(var_err, std::fabs(mom.variance - table.variance));
      const auto lo = static_cast<std::size_t>(std::floor(table.mean));
      const auto hi = static_cast<std::size_t>(std::ceil(table.mean));
      for (std::size_t i = 0; i + 1 < table.pmf.size(); ++i) {
        if (i + 1 <= lo && table.pmf[i] > table.pmf[i + 1] + kSlack) ++unimodal_failures;
        if (i >= hi && table.pmf[i] + kSlack < table.pmf[i + 1]) ++unimodal_failures;
      }
    }
    out = "max |sum-1| " + fmt(norm_err) + ", max mean err " + fmt(mean_err) +
          ", max var err " + fmt(var_err) + ", unimodality violations " +
          std::to_string(unimodal_failures);
    return norm_err <= 1e-12 && mean_err <= 1e-9 && var_err <= 1e-9 && unimodal_failures == 0;
  });
}

CheckResult chunk_probability_floor(std::uint64_t seed) {
  return timed(3, "Poisson binomial chunk probability", 10.0, [seed](std::string& out) {
    Pcg32 rng = umda::seed(seed, 3);
    constexpr double kEll = 0.25;
    constexpr double kU = 0.25;
    constexpr double kFloor = 0.1;
    double lowest = INFINITY;
    double lowest_mass = INFINITY;
    for (int inst = 0; inst < 200; ++inst) {
      const std::size_t m = 5 + rng.bounded(196);
      const double edge = 1.0 / static_cast<double>(m);
      const auto p = random_probabilities(rng, m, edge, 1.0 - edge);
      const auto table = poisson_binomial_pmf(p);
      const auto b = chunk_bounds(table, kEll, kU);
      double mass = 0.0;
      for (std::size_t k = b.k_ell; k <= b.k_u; ++k) mass += table.pmf[k];
      lowest_mass = std::min(lowest_mass, mass);
      lowest = std::min(lowest, verify_chunk_lower_bound(p, kEll, kU));
    }
    out = "min pmf*max(1,sigma) " + fmt(lowest) + " (floor " + fmt(kFloor) +
          "), min chunk mass " + fmt(lowest_mass);
    return lowest > kFloor && lowest_mass >= 1.0 - kEll - kU - 1e-12;
  });
}

CheckResult decomposition_invariants(std::uint64_t seed) {
  return timed(4, "level decomposition invariants", 30.0, [seed](std::string& out) {
    struct Setting {
      std::size_t n, mu, lambda;
      Borders borders;
    };
    const Setting grid[] = {
        {10, 3, 6, Borders::restricted},    {20, 5, 10, Borders::restricted},
        {20, 10, 15, Borders::unrestricted}, {50, 10, 20, Borders::restricted},
        {50, 25, 50, Borders::restricted},   {100, 20, 40, Borders::unrestricted},
        {100, 50, 100, Borders::restricted}, {200, 30, 90, Borders::restricted},
    };
    constexpr std::size_t kGenerations = 10'000;
    constexpr std::size_t kPerRun = 250;
    std::size_t checked = 0;
    std::size_t failures = 0;
    std::size_t degenerate = 0;
    std::size_t run_index = 0;
    while (checked < kGenerations) {
      for (const auto& s : grid) {
        UmdaConfig cfg;
        cfg.n = s.n;
        cfg.mu = s.mu;
        cfg.lambda = s.lambda;
        cfg.borders = s.borders;
        cfg.master_seed = seed;
        cfg.run_index = derive_stream(4, run_index++);
        cfg.keep_generation_stats = false;
        Simulator sim(cfg);
        Pcg32 focal_rng = umda::seed(seed, cfg.run_index ^ 0x5eedU);
        for (std::size_t g = 0; g < kPerRun && checked < kGenerations; ++g, ++checked) {
          sim.step();
          const std::size_t focal = focal_rng.bounded(static_cast<std::uint32_t>(s.n));
          const auto d = decompose(sim.population(), s.mu, focal, sim.target());
          std::size_t total = 0;
          for (const auto c : d.level_counts) total += c;
          bool ok = total == s.lambda && d.cumulative[0] == s.lambda && d.m >= 1;
          ok = ok && d.cumulative[d.m - 1] > s.mu && d.overhang >= 1;
          if (d.degenerate) {
            ++degenerate;
            ok = ok && d.m == s.n - 1;
          } else {
            ok = ok && d.c_geq_m <= s.mu &&
                 d.overhang == static_cast<std::ptrdiff_t>(d.d_star) -
                                   static_cast<std::ptrdiff_t>(d.c_star_star);
          }
          if (!ok) ++failures;
        }
        if (checked >= kGenerations) break;
      }
    }
    out = std::to_string(checked) + " generations, " + std::to_string(failures) +
          " violations, " + std::to_string(degenerate) + " flagged M=n-1 degeneracies";
    return failures == 0;
  });
}

CheckResult binomial_dominance(std::uint64_t seed) {
  return timed(5, "stochastic dominance of X_{t+1}", 60.0, [seed](std::string& out) {
    constexpr double kEpsilon = 0.03;
    const auto p = FrequencyVector::uniform(kStepN, Borders::restricted);
    double worst = -1.0;
    std::ostringstream detail;
    for (const std::size_t x : {10U, 25U, 40U}) {
      Pcg32 rng = umda::seed(seed, 500 + x);
      const auto samples =
          sample_next_focal_counts(p, kStepMu, kStepLambda, 0, x, kStepTrials, rng);
      const double excess = dominance_excess(samples, kStepMu, static_cast<double>(x) / kStepMu);
      worst = std::max(worst, excess);
      detail << "X_t=" << x << ": max(F_emp-F_bin) " << fmt(excess) << "; ";
    }
    out = detail.str() + "epsilon " + fmt(kEpsilon);
    return worst <= kEpsilon;
  });
}

CheckResult positive_drift(std::uint64_t seed) {
  return timed(6, "positive drift of X_t", 60.0, [seed](std::string& out) {
    const auto p = FrequencyVector::uniform(kStepN, Borders::restricted);
    Pcg32 rng = umda::seed(seed, 600);
    const auto e = empirical_step_drift(p, kStepMu, kStepLambda, 0, 25, kStepTrials, rng);
    out = "mean " + fmt(e.mean) + ", stderr " + fmt(e.stderr_mean) + ", z " + fmt(e.z);
    return e.mean > 0.0 && e.z >= 5.0;
  });
}

CheckResult sqrt_n_generation_scaling(std::uint64_t seed, unsigned threads) {
  return timed(7, "generation scaling above the phase transition", 600.0,
               [seed, threads](std::string& out) {
                 ScalingConfig cfg;
                 cfg.n_values = {64, 256, 1024};
                 cfg.mu_rule = SizeRule(SizeRule::Kind::sqrt_log, 3.0);
                 cfg.lambda_factor = 2.0;
                 cfg.borders = Borders::restricted;
                 cfg.runs = 50;
                 cfg.master_seed = seed;
                 cfg.threads = threads;
                 const auto study = run_scaling_study(cfg);
                 bool ok = study.slope && *study.slope >= 0.4 && *study.slope <= 0.7;
                 std::ostringstream s;
                 for (const auto& pt : study.points) {
                   s << "n=" << pt.n << " median gens " << fmt(pt.median_generations)
                     << " success " << fmt(pt.success_fraction) << "; ";
                   ok = ok && pt.success_fraction >= 0.5;
                 }
                 s << "slope " << (study.slope ? fmt(*study.slope) : "n/a");
                 out = s.str();
                 return ok;
               });
}

CheckResult linear_generation_scaling(std::uint64_t seed, unsigned threads) {
  return timed(8, "generation scaling below the phase transition", 600.0,
               [seed, threads](std::string& out) {
                 ScalingConfig cfg;
                 cfg.n_values = {128, 512, 2048};
                 cfg.mu_rule = SizeRule(SizeRule::Kind::log, 5.0);
                 cfg.lambda_factor = 2.0;
                 cfg.borders = Borders::restricted;
                 cfg.runs = 50;
                 cfg.master_seed = seed;
                 cfg.threads = threads;
                 const auto study = run_scaling_study(cfg);
                 bool ok = study.slope && *study.slope >= 0.8 && *study.slope <= 1.2;
                 std::ostringstream s;
                 for (const auto& pt : study.points) {
                   s << "n=" << pt.n << " median gens " << fmt(pt.median_generations)
                     << " success " << fmt(pt.success_fraction) << "; ";
                   ok = ok && pt.success_fraction == 1.0;
                 }
                 s << "slope " << (study.slope ? fmt(*study.slope) : "n/a");
                 out = s.str();
                 return ok;
               });
}

CheckResult unrestricted_phase_transition(std::uint64_t seed, unsigned threads) {
  return timed(9, "UMDA* stagnation below the phase transition", 600.0,
               [seed, threads](std::string& out) {
                 PhaseConfig cfg;
                 cfg.n = 500;
                 cfg.mu_small = SizeRule(SizeRule::Kind::log, 3.0).apply(cfg.n);
                 cfg.mu_large = SizeRule(SizeRule::Kind::sqrt_log, 3.0).apply(cfg.n);
                 cfg.lambda_factor = 2.0;
                 cfg.borders = Borders::unrestricted;
                 cfg.runs = 100;
                 cfg.master_seed = seed;
                 cfg.threads = threads;
                 const auto probe = run_phase_transition_probe(cfg);
                 out = "mu=" + std::to_string(probe.small.mu) + " stagnated " +
                       fmt(probe.small.stagnated_fraction) + "; mu=" +
                       std::to_string(probe.large.mu) + " success " +
                       fmt(probe.large.success_fraction);
                 return probe.small.stagnated_fraction >= 0.8 &&
                        probe.large.success_fraction >= 0.5;
               });
}

CheckResult lambda_sweep_shape(std::uint64_t seed, unsigned threads, const std::string& csv_out) {
  return timed(10, "lambda sweep runtime and border-hit shape", 900.0,
               [&](std::string& out) {
                 SweepConfig cfg;
                 cfg.n = 500;
                 cfg.lambdas = {10, 150, 4};
                 cfg.mu_rule = MuRule::ratio(2);
                 cfg.borders = Borders::restricted;
                 cfg.runs_per_setting = 200;
                 cfg.master_seed = seed;
                 cfg.threads = threads;
                 cfg.output_path = csv_out;
                 const auto rows = run_sweep(cfg);
                 std::vector<double> lambdas;
                 std::vector<double> evals;
                 std::vector<double> log_hits;
                 double success = 1.0;
                 for (const auto& r : rows) {
                   lambdas.push_back(static_cast<double>(r.lambda));
                   evals.push_back(r.avg_evaluations);
                   log_hits.push_back(std::log(r.avg_lower_border_hits + 1.0));
                   success = std::min(success, r.success_fraction);
                 }
                 const auto smooth = moving_average(evals, 5);
                 const bool multimodal = has_min_then_max(smooth);
                 const double rho = spearman(lambdas, log_hits);
                 const auto best = std::min_element(evals.begin(), evals.end()) - evals.begin();
                 out = "min-then-max " + std::string(multimodal ? "yes" : "no") +
                       ", spearman " + fmt(rho) + ", argmin lambda " +
                       std::to_string(rows[static_cast<std::size_t>(best)].lambda) +
                       ", min success " + fmt(success);
                 return multimodal && rho <= -0.9;
               });
}

CheckResult rerun_determinism(const std::string& scratch_dir, std::uint64_t seed) {
  return timed(11, "byte-identical reruns", 600.0, [&](std::string& out) {
    namespace fs = std::filesystem;
    fs::create_directories(scratch_dir);
    auto path = [&](const std::string& name) { return (fs::path(scratch_dir) / name).string(); };

    SweepConfig sweep;
    sweep.n = 100;
    sweep.lambdas = {10, 30, 4};
    sweep.runs_per_setting = 5;
    sweep.master_seed = seed;
    sweep.threads = 1;
    sweep.output_path = path("sweep_a.txt");
    run_sweep(sweep);
    sweep.threads = 4;
    sweep.output_path = path("sweep_b.txt");
    run_sweep(sweep);

    SweepConfig single = sweep;
    single.runs_per_setting = 1;
    single.threads = 1;
    single.output_path = path("single_a.txt");
    run_sweep(single);
    single.output_path = path("single_b.txt");
    run_sweep(single);

    ScalingConfig scaling;
    scaling.n_values = {32, 64};
    scaling.runs = 5;
    scaling.master_seed = seed;
    scaling.threads = 1;
    write_text_file(path("scaling_a.txt"), format_scaling(run_scaling_study(scaling)));
    scaling.threads = 3;
    write_text_file(path("scaling_b.txt"), format_scaling(run_scaling_study(scaling)));

    PhaseConfig phase;
    phase.n = 100;
    phase.mu_small = 8;
    phase.mu_large = 60;
    phase.runs = 5;
    phase.master_seed = seed;
    phase.threads = 1;
    write_text_file(path("phase_a.txt"), format_phase(run_phase_transition_probe(phase)));
    phase.threads = 2;
    write_text_file(path("phase_b.txt"), format_phase(run_phase_transition_probe(phase)));

    std::size_t identical = 0;
    std::size_t pairs = 0;
    for (const char* stem : {"sweep", "single", "scaling", "phase"}) {
      ++pairs;
      const auto a = read_file(path(std::string(stem) + "_a.txt"));
      const auto b = read_file(path(std::string(stem) + "_b.txt"));
      if (!a.empty() && a == b) ++identical;
    }
    out = std::to_string(identical) + "/" + std::to_string(pairs) + " output pairs identical";
    return identical == pairs;
  });
}

std::vector<CheckResult> run_quick(std::uint64_t seed) {
  return {capped_binomial_bound(),   poisson_binomial_oracle(seed),
          chunk_probability_floor(seed), decomposition_invariants(seed),
          binomial_dominance(seed),  positive_drift(seed)};
}

std::string describe(const CheckResult& r) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
  return std::string(r.passed ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name +
         ": " + r.measured + " (" + secs + " s)";
}

}  // namespace umda::verify
