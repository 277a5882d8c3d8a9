#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "umda/error.hpp"
#include "umda/oracles.hpp"
#include "umda/umda.hpp"

namespace {

using umda::Borders;
using umda::FrequencyVector;
using umda::UmdaConfig;
using umda::Verdict;

UmdaConfig make_config(std::size_t n, std::size_t mu, std::size_t lambda, Borders b,
                       std::uint64_t seed = 1, std::uint64_t run = 0) {
  UmdaConfig cfg;
  cfg.n = n;
  cfg.mu = mu;
  cfg.lambda = lambda;
  cfg.borders = b;
  cfg.master_seed = seed;
  cfg.run_index = run;
  return cfg;
}

TEST(Selection, DistinctFitnessTakesTopMu) {
  const std::vector<std::size_t> fitness{4, 9, 1, 7, 3, 8, 0};
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto rng = umda::seed(s, 0U);
    auto picked = umda::select_mu_best_indices(fitness, 3, rng);
    std::sort(picked.begin(), picked.end());
    EXPECT_EQ(picked, (std::vector<std::size_t>{1, 3, 5}));
  }
}

TEST(Selection, TiesAreBrokenUniformly) {
  const std::vector<std::size_t> fitness{5, 5, 5, 5};
  auto rng = umda::seed(2U, 0U);
  constexpr int kTrials = 100000;
  std::map<std::pair<std::size_t, std::size_t>, int> counts;
  for (int t = 0; t < kTrials; ++t) {
    auto picked = umda::select_mu_best_indices(fitness, 2, rng);
    ASSERT_EQ(picked.size(), 2U);
    std::sort(picked.begin(), picked.end());
    ASSERT_NE(picked[0], picked[1]);
    ++counts[{picked[0], picked[1]}];
  }
  ASSERT_EQ(counts.size(), 6U);
  for (const auto& [pair, c] : counts) {
    EXPECT_NEAR(static_cast<double>(c) / kTrials, 1.0 / 6.0, 0.02);
  }
}

TEST(Selection, TiesAtCutoffOnly) {
  // Two strictly fitter rows are always taken; the third slot is uniform over
  // the four rows tied at the cutoff.
  const std::vector<std::size_t> fitness{3, 9, 3, 3, 8, 3, 1};
  auto rng = umda::seed(3U, 0U);
  constexpr int kTrials = 40000;
  std::vector<int> hits(fitness.size(), 0);
  for (int t = 0; t < kTrials; ++t) {
    for (const auto r : umda::select_mu_best_indices(fitness, 3, rng)) ++hits[r];
  }
  EXPECT_EQ(hits[1], kTrials);
  EXPECT_EQ(hits[4], kTrials);
  EXPECT_EQ(hits[6], 0);
  for (std::size_t r : {0U, 2U, 3U, 5U}) EXPECT_NEAR(hits[r] / double(kTrials), 0.25, 0.015);
}

TEST(Selection, MuEqualsLambdaAndErrors) {
  const std::vector<std::size_t> fitness{2, 2, 1};
  auto rng = umda::seed(4U, 0U);
  auto all = umda::select_mu_best_indices(fitness, 3, rng);
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_THROW(umda::select_mu_best_indices(fitness, 4, rng), umda::ContractViolation);
  EXPECT_THROW(umda::select_mu_best_indices(fitness, 0, rng), umda::ContractViolation);
}

TEST(Selection, PopulationOverloadKeepsFittest) {
  auto rng = umda::seed(5U, 0U);
  const auto p = FrequencyVector::uniform(40, Borders::restricted);
  const auto pop = umda::sample_population(p, 30, rng);
  const auto sel = umda::select_mu_best(pop, 10, rng);
  ASSERT_EQ(sel.size(), 10U);
  std::vector<std::size_t> all(pop.fitness().begin(), pop.fitness().end());
  std::sort(all.rbegin(), all.rend());
  std::vector<std::size_t> got(sel.fitness().begin(), sel.fitness().end());
  std::sort(got.rbegin(), got.rend());
  EXPECT_EQ(got, std::vector<std::size_t>(all.begin(), all.begin() + 10));
}

TEST(Update, Examples) {
  std::vector<std::uint32_t> ones(100, 5);
  ones[7] = 3;
  const auto u = umda::update_frequencies(ones, 10, Borders::restricted);
  EXPECT_DOUBLE_EQ(u.frequencies[7], 0.3);
  EXPECT_EQ(u.events.lower_hits, 0U);
  EXPECT_EQ(u.events.upper_hits, 0U);

  std::vector<std::uint32_t> low(20, 5);
  low[2] = 0;
  const auto r = umda::update_frequencies(low, 10, Borders::restricted);
  EXPECT_DOUBLE_EQ(r.frequencies[2], 0.05);
  EXPECT_EQ(r.events.lower_hits, 1U);
  EXPECT_EQ(r.events.per_position[2], umda::BorderEvents::Hit::lower);

  const auto s = umda::update_frequencies(low, 10, Borders::unrestricted);
  EXPECT_EQ(s.frequencies[2], 0.0);

  std::vector<std::uint32_t> high(20, 5);
  high[4] = 10;
  const auto h = umda::update_frequencies(high, 10, Borders::restricted);
  EXPECT_DOUBLE_EQ(h.frequencies[4], 0.95);
  EXPECT_EQ(h.events.upper_hits, 1U);
  EXPECT_EQ(umda::update_frequencies(high, 10, Borders::unrestricted).frequencies[4], 1.0);
}

TEST(Update, BorderHitsAreStrict) {
  // n = 10, mu = 10: x / mu = 1/10 sits exactly on the lower border.
  std::vector<std::uint32_t> ones(10, 1);
  ones[0] = 9;
  const auto u = umda::update_frequencies(ones, 10, Borders::restricted);
  EXPECT_EQ(u.events.lower_hits, 0U);
  EXPECT_EQ(u.events.upper_hits, 0U);
  EXPECT_DOUBLE_EQ(u.frequencies[1], 0.1);
}

TEST(CountOnes, MatchesBitwiseCount) {
  auto rng = umda::seed(6U, 0U);
  std::vector<double> v(150);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.01 + 0.98 * static_cast<double>(i) / 150.0;
  const FrequencyVector p(v, Borders::unrestricted);
  const auto pop = umda::sample_population(p, 37, rng);
  const std::vector<std::size_t> rows{3, 0, 36, 17, 17};
  const auto got = umda::count_ones(pop, rows);
  const auto all = umda::count_ones(pop, {});
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::uint32_t expect = 0;
    for (const auto r : rows) expect += pop.bit(r, i) ? 1U : 0U;
    EXPECT_EQ(got[i], expect);
    std::uint32_t expect_all = 0;
    for (std::size_t j = 0; j < pop.size(); ++j) expect_all += pop.bit(j, i) ? 1U : 0U;
    EXPECT_EQ(all[i], expect_all);
  }
}

TEST(Step, FrequenciesAreCountsOverMu) {
  auto cfg = make_config(20, 10, 20, Borders::unrestricted);
  auto rng = umda::seed(7U, 0U);
  auto p = FrequencyVector::uniform(20, Borders::unrestricted);
  for (int g = 0; g < 20; ++g) {
    auto r = umda::step(p, cfg, rng);
    for (std::size_t i = 0; i < 20; ++i) {
      const double scaled = r.frequencies[i] * 10.0;
      EXPECT_DOUBLE_EQ(scaled, std::round(scaled));
    }
    EXPECT_EQ(r.population.size(), 20U);
    EXPECT_EQ(r.selected.size(), 10U);
    p = r.frequencies;
  }
}

TEST(Step, RestrictedValuesAreCountsOrBorders) {
  auto cfg = make_config(20, 10, 20, Borders::restricted);
  auto rng = umda::seed(8U, 0U);
  auto p = FrequencyVector::uniform(20, Borders::restricted);
  for (int g = 0; g < 30; ++g) {
    auto r = umda::step(p, cfg, rng);
    for (std::size_t i = 0; i < 20; ++i) {
      const double v = r.frequencies[i];
      const double scaled = v * 10.0;
      EXPECT_TRUE(v == 0.05 || v == 0.95 || std::abs(scaled - std::round(scaled)) < 1e-12) << v;
    }
    p = r.frequencies;
  }
}

TEST(Step, AdvancesCallerGenerator) {
  auto cfg = make_config(10, 2, 4, Borders::restricted);
  auto rng = umda::seed(9U, 0U);
  const auto before = rng;
  (void)umda::step(FrequencyVector::uniform(10, Borders::restricted), cfg, rng);
  EXPECT_NE(rng, before);
}

TEST(Run, TinyInstanceFirstGenerationSuccessRate) {
  constexpr int kRuns = 100000;
  int first = 0;
  for (int r = 0; r < kRuns; ++r) {
    auto cfg = make_config(1, 1, 2, Borders::unrestricted, 5, static_cast<std::uint64_t>(r));
    cfg.keep_generation_stats = false;
    const auto res = umda::run(cfg);
    if (res.verdict == Verdict::optimum_found && res.generations == 1) ++first;
  }
  EXPECT_NEAR(static_cast<double>(first) / kRuns, 0.75, 0.01);
}

TEST(Run, ForcedWrongAbsorptionStagnates) {
  auto cfg = make_config(6, 3, 6, Borders::unrestricted);
  const FrequencyVector p({0.5, 0.5, 0.0, 0.5, 0.5, 0.5}, Borders::unrestricted);
  EXPECT_TRUE(umda::is_stagnated(p, cfg.resolved_target()));
  const auto res = umda::run(cfg, p);
  EXPECT_EQ(res.verdict, Verdict::stagnated);
  EXPECT_EQ(res.evaluations, cfg.lambda * res.generations);

  umda::BitString a = umda::BitString::from_string("110111");
  cfg.target = umda::TargetString(a);
  EXPECT_FALSE(umda::is_stagnated(p, *cfg.target));
  const FrequencyVector q({0.5, 0.5, 1.0, 0.5, 0.5, 0.5}, Borders::unrestricted);
  EXPECT_TRUE(umda::is_stagnated(q, *cfg.target));
}

TEST(Run, SmallMuUnrestrictedStagnates) {
  // mu = 2 on n = 60 fixes some frequency at 0 almost immediately.
  int stagnated = 0;
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto res = umda::run(make_config(60, 2, 4, Borders::unrestricted, 3, r));
    stagnated += res.verdict == Verdict::stagnated ? 1 : 0;
  }
  EXPECT_GE(stagnated, 18);
}

TEST(Run, RestrictedNeverStagnates) {
  for (std::uint64_t r = 0; r < 40; ++r) {
    auto cfg = make_config(60, 2, 4, Borders::restricted, 3, r);
    cfg.max_generations = 300;
    const auto res = umda::run(cfg);
    EXPECT_NE(res.verdict, Verdict::stagnated);
  }
}

TEST(Run, FindsOptimumOfShiftedTarget) {
  auto cfg = make_config(40, 20, 40, Borders::restricted, 11);
  cfg.target = umda::TargetString(umda::BitString::from_string("1011001110001011110100101100111000101101"));
  const auto res = umda::run(cfg);
  ASSERT_EQ(res.verdict, Verdict::optimum_found);
  EXPECT_EQ(res.evaluations, 40U * res.generations);
  const auto& last = res.telemetry.per_generation().back();
  EXPECT_EQ(last.t, res.generations);
  EXPECT_EQ(last.best_fitness, 40U);
}

TEST(Run, BudgetExhausted) {
  auto cfg = make_config(200, 3, 6, Borders::restricted, 1);
  cfg.max_generations = 5;
  const auto res = umda::run(cfg);
  EXPECT_EQ(res.verdict, Verdict::budget_exhausted);
  EXPECT_EQ(res.generations, 5U);
  EXPECT_EQ(res.evaluations, 30U);
  EXPECT_EQ(cfg.generation_budget(), 5U);
  cfg.max_generations.reset();
  EXPECT_EQ(cfg.generation_budget(), 40000U);
}

TEST(Run, Deterministic) {
  auto cfg = make_config(80, 12, 24, Borders::restricted, 17, 4);
  const auto a = umda::run(cfg);
  const auto b = umda::run(cfg);
  EXPECT_EQ(a.verdict, b.verdict);
  EXPECT_EQ(a.generations, b.generations);
  EXPECT_EQ(a.evaluations, b.evaluations);
  EXPECT_EQ(a.final_frequencies, b.final_frequencies);
  ASSERT_EQ(a.telemetry.per_generation().size(), b.telemetry.per_generation().size());
  for (std::size_t g = 0; g < a.telemetry.per_generation().size(); ++g) {
    const auto& x = a.telemetry.per_generation()[g];
    const auto& y = b.telemetry.per_generation()[g];
    EXPECT_EQ(x.sigma_sq, y.sigma_sq);
    EXPECT_EQ(x.lower_border_hits, y.lower_border_hits);
    EXPECT_EQ(x.best_fitness, y.best_fitness);
  }
  cfg.run_index = 5;
  const auto c = umda::run(cfg);
  EXPECT_FALSE(c.generations == a.generations && c.final_frequencies == a.final_frequencies);
}

TEST(Simulator, RestrictedFrequenciesStayInsideBorders) {
  for (std::size_t n : {2U, 10U, 75U}) {
    auto cfg = make_config(n, 3, 7, Borders::restricted, 19);
    umda::Simulator sim(cfg);
    const double lo = 1.0 / static_cast<double>(n);
    const double hi = 1.0 - lo;
    for (int g = 0; g < 200; ++g) {
      const auto& stats = sim.step();
      EXPECT_EQ(stats.t, sim.generation());
      for (const double v : sim.frequencies().values()) {
        ASSERT_GE(v, lo);
        ASSERT_LE(v, hi);
      }
      EXPECT_FALSE(sim.stagnated());
    }
  }
}

TEST(Simulator, ExposesGenerationState) {
  auto cfg = make_config(30, 5, 10, Borders::restricted, 23);
  umda::Simulator sim(cfg);
  EXPECT_EQ(sim.generation(), 0U);
  sim.step();
  EXPECT_EQ(sim.generation(), 1U);
  EXPECT_EQ(sim.population().size(), 10U);
  EXPECT_EQ(sim.selected().size(), 5U);
  EXPECT_EQ(sim.last_events().per_position.size(), 30U);
  // t = 0 record plus one per generation.
  EXPECT_EQ(sim.telemetry().per_generation().size(), 2U);
}

TEST(Config, Validation) {
  EXPECT_THROW(make_config(10, 5, 5, Borders::restricted).validate(), umda::ContractViolation);
  EXPECT_THROW(make_config(10, 0, 5, Borders::restricted).validate(), umda::ContractViolation);
  EXPECT_THROW(make_config(1, 1, 2, Borders::restricted).validate(), umda::ContractViolation);
  EXPECT_NO_THROW(make_config(1, 1, 2, Borders::unrestricted).validate());
  auto cfg = make_config(4, 1, 2, Borders::restricted);
  cfg.target = umda::TargetString::all_ones(5);
  EXPECT_THROW(cfg.validate(), umda::ContractViolation);
}

TEST(FocalBit, DominatesBinomialOnSmallGrid) {
  const std::size_t n = 30;
  const std::size_t mu = 20;
  const std::size_t lambda = 40;
  const std::size_t trials = 4000;
  const double eps = umda::dkw_epsilon(trials, 0.001);
  const auto p = FrequencyVector::uniform(n, Borders::restricted);
  auto rng = umda::seed(31U, 0U);
  for (std::size_t x : {4U, 10U, 16U}) {
    const auto counts = umda::sample_next_focal_counts(p, mu, lambda, 0, x, trials, rng);
    EXPECT_LE(umda::dominance_excess(counts, mu, static_cast<double>(x) / mu), eps) << "x=" << x;
  }
}

TEST(FocalBit, PositiveDriftAtOneHalf) {
  const auto p = FrequencyVector::uniform(30, Borders::restricted);
  auto rng = umda::seed(32U, 0U);
  const auto d = umda::empirical_step_drift(p, 20, 40, 3, 10, 4000, rng);
  EXPECT_GT(d.mean, 0.0);
  EXPECT_GE(d.z, 5.0);
}

}  // namespace
