#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "umda/error.hpp"
#include "umda/oracles.hpp"

namespace {

using umda::Borders;
using umda::FrequencyVector;

// Exhaustive enumeration over all 2^m outcomes.
std::vector<double> enumerate_pmf(const std::vector<double>& p) {
  const std::size_t m = p.size();
  std::vector<double> pmf(m + 1, 0.0);
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    double prob = 1.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const bool one = (mask >> i) & 1U;
      prob *= one ? p[i] : 1.0 - p[i];
      k += one ? 1U : 0U;
    }
    pmf[k] += prob;
  }
  return pmf;
}

TEST(PoissonBinomial, Examples) {
  const auto fair = umda::poisson_binomial_pmf(std::vector<double>{0.5, 0.5});
  EXPECT_EQ(fair.pmf, (std::vector<double>{0.25, 0.5, 0.25}));
  const auto forced = umda::poisson_binomial_pmf(std::vector<double>{1.0, 0.3});
  EXPECT_DOUBLE_EQ(forced.pmf[0], 0.0);
  EXPECT_DOUBLE_EQ(forced.pmf[1], 0.7);
  EXPECT_DOUBLE_EQ(forced.pmf[2], 0.3);
  const auto three = umda::poisson_binomial_pmf(std::vector<double>{0.2, 0.4, 0.6});
  EXPECT_NEAR(three.pmf[0], 0.192, 1e-15);
  EXPECT_NEAR(three.pmf[3], 0.048, 1e-15);
  EXPECT_NEAR(three.mean, 1.2, 1e-15);
  EXPECT_NEAR(three.variance, 0.64, 1e-15);
}

TEST(PoissonBinomial, MatchesEnumeration) {
  auto rng = umda::seed(1U, 0U);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(1 + rng.bounded(12));
    for (auto& q : p) q = rng.uniform01();
    const auto table = umda::poisson_binomial_pmf(p);
    const auto expected = enumerate_pmf(p);
    for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(table.pmf[k], expected[k], 1e-13);
  }
}

TEST(PoissonBinomial, InvariantsOnRandomInstances) {
  auto rng = umda::seed(2U, 0U);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> p(1 + rng.bounded(200));
    for (auto& q : p) q = rng.uniform01();
    const auto table = umda::poisson_binomial_pmf(p);
    const auto mom = umda::pmf_moments(table.pmf);
    for (const double v : table.pmf) ASSERT_GE(v, 0.0);
    ASSERT_NEAR(mom.total, 1.0, 1e-12);
    ASSERT_NEAR(mom.mean, table.mean, 1e-9);
    ASSERT_NEAR(mom.variance, table.variance, 1e-9);
    const auto lo = static_cast<std::size_t>(std::floor(table.mean));
    const auto hi = static_cast<std::size_t>(std::ceil(table.mean));
    for (std::size_t i = 0; i + 1 < table.pmf.size(); ++i) {
      if (i + 1 <= lo) ASSERT_LE(table.pmf[i], table.pmf[i + 1] + 1e-12);
      if (i >= hi) ASSERT_GE(table.pmf[i] + 1e-12, table.pmf[i + 1]);
    }
  }
}

TEST(PoissonBinomial, CdfAndSurvival) {
  const auto t = umda::poisson_binomial_pmf(std::vector<double>{0.5, 0.5});
  EXPECT_DOUBLE_EQ(t.cdf(0), 0.25);
  EXPECT_DOUBLE_EQ(t.cdf(5), 1.0);
  EXPECT_DOUBLE_EQ(t.survival(2), 0.25);
  EXPECT_DOUBLE_EQ(t.survival(0), 1.0);
  EXPECT_THROW(umda::poisson_binomial_pmf(std::vector<double>{1.2}), umda::ContractViolation);
}

TEST(ChunkBounds, Examples) {
  const auto fair = umda::poisson_binomial_pmf(std::vector<double>{0.5, 0.5});
  const auto b = umda::chunk_bounds(fair, 0.25, 0.25);
  EXPECT_EQ(b.k_ell, 0U);
  EXPECT_EQ(b.k_u, 2U);

  const auto ones = umda::poisson_binomial_pmf(std::vector<double>(7, 1.0));
  const auto c = umda::chunk_bounds(ones, 0.25, 0.25);
  EXPECT_EQ(c.k_ell, 7U);
  EXPECT_EQ(c.k_u, 7U);

  for (std::size_t m : {3U, 10U, 51U}) {
    const auto sym = umda::poisson_binomial_pmf(std::vector<double>(m, 0.5));
    for (double ell : {0.1, 0.25, 0.4}) {
      const auto s = umda::chunk_bounds(sym, ell, ell);
      EXPECT_EQ(s.k_ell + s.k_u, m) << m << " " << ell;
    }
  }
  EXPECT_THROW(umda::chunk_bounds(fair, 0.5, 0.5), umda::ContractViolation);
  EXPECT_THROW(umda::chunk_bounds(fair, 0.0, 0.5), umda::ContractViolation);
}

TEST(ChunkBounds, DefinitionAndMass) {
  auto rng = umda::seed(3U, 0U);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 5 + rng.bounded(196);
    std::vector<double> p(m);
    for (auto& q : p) q = 1.0 / m + (1.0 - 2.0 / m) * rng.uniform01();
    const auto table = umda::poisson_binomial_pmf(p);
    const auto b = umda::chunk_bounds(table, 0.25, 0.25);
    ASSERT_LE(b.k_ell, b.k_u);
    ASSERT_GE(table.cdf(b.k_ell), 0.25);
    if (b.k_ell > 0) ASSERT_LT(table.cdf(b.k_ell - 1), 0.25);
    ASSERT_GE(table.survival(b.k_u), 0.25);
    if (b.k_u < m) ASSERT_LT(table.survival(b.k_u + 1), 0.25);
    double mass = 0.0;
    for (std::size_t k = b.k_ell; k <= b.k_u; ++k) mass += table.pmf[k];
    ASSERT_GE(mass, 0.5 - 1e-12);
  }
}

TEST(ChunkLowerBound, Examples) {
  EXPECT_DOUBLE_EQ(umda::verify_chunk_lower_bound(std::vector<double>{0.5}, 0.25, 0.25), 0.5);
  EXPECT_GE(umda::verify_chunk_lower_bound(std::vector<double>(400, 0.5), 0.25, 0.25), 0.3);
}

TEST(ChunkLowerBound, FloorOverRandomInstances) {
  auto rng = umda::seed(4U, 0U);
  double lowest = 1.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 5 + rng.bounded(196);
    std::vector<double> p(m);
    for (auto& q : p) q = 1.0 / m + (1.0 - 2.0 / m) * rng.uniform01();
    lowest = std::min(lowest, umda::verify_chunk_lower_bound(p, 0.25, 0.25));
  }
  EXPECT_GT(lowest, 0.1);
}

TEST(Binomial, PmfAndCdf) {
  const auto pmf = umda::binomial_pmf(4, 0.5);
  const std::vector<double> expected{1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0, 1 / 16.0};
  for (std::size_t k = 0; k <= 4; ++k) EXPECT_DOUBLE_EQ(pmf[k], expected[k]);
  const auto cdf = umda::binomial_cdf(4, 0.5);
  EXPECT_DOUBLE_EQ(cdf[1], 5 / 16.0);
  EXPECT_DOUBLE_EQ(cdf[4], 1.0);
  const auto big = umda::binomial_pmf(60, 0.3);
  const auto table = umda::poisson_binomial_pmf(std::vector<double>(60, 0.3));
  for (std::size_t k = 0; k <= 60; ++k) EXPECT_NEAR(big[k], table.pmf[k], 1e-14);
  EXPECT_THROW(umda::binomial_pmf(61, 0.5), umda::ContractViolation);
}

TEST(CappedBinomial, Examples) {
  EXPECT_DOUBLE_EQ(umda::expected_min_capped_binomial(1, 2, 0.5), 0.75);
  EXPECT_DOUBLE_EQ(umda::expected_min_capped_binomial(2, 4, 0.5), 1.625);
  for (std::size_t d : {1U, 5U, 12U}) {
    EXPECT_NEAR(umda::expected_min_capped_binomial(d, d, 0.3), d * 0.3, 1e-12);
  }
  EXPECT_THROW(umda::expected_min_capped_binomial(0, 3, 0.5), umda::ContractViolation);
  EXPECT_THROW(umda::expected_min_capped_binomial(4, 3, 0.5), umda::ContractViolation);
}

TEST(CappedBinomialBound, Examples) {
  EXPECT_DOUBLE_EQ(umda::capped_binomial_lower_bound(2, 4, 0.5), 1.125);
  EXPECT_DOUBLE_EQ(umda::capped_binomial_lower_bound(5, 5, 0.3), 1.5);
  for (double p : {0.0, 1.0}) {
    EXPECT_EQ(umda::capped_binomial_lower_bound(3, 7, p), 3 * p);
  }
  EXPECT_THROW(umda::capped_binomial_lower_bound(0, 3, 0.5), umda::ContractViolation);
  EXPECT_THROW(umda::capped_binomial_lower_bound(4, 3, 0.5), umda::ContractViolation);
}

TEST(CappedBinomialBound, HoldsExhaustively) {
  for (std::size_t d = 1; d <= 12; ++d) {
    for (std::size_t c = 1; c <= d; ++c) {
      for (int step = 1; step <= 19; ++step) {
        const double p = 0.05 * step;
        EXPECT_GE(umda::expected_min_capped_binomial(c, d, p) -
                      umda::capped_binomial_lower_bound(c, d, p),
                  -1e-12)
            << "C=" << c << " D=" << d << " p=" << p;
      }
    }
  }
}

TEST(FocalSteps, AbsorbedFocalBitHasZeroDrift) {
  const auto p = FrequencyVector::uniform(30, Borders::unrestricted);
  auto rng = umda::seed(5U, 0U);
  const auto full = umda::empirical_step_drift(p, 10, 20, 4, 10, 200, rng);
  EXPECT_EQ(full.mean, 0.0);
  EXPECT_EQ(full.stderr_mean, 0.0);
  const auto empty = umda::empirical_step_drift(p, 10, 20, 4, 0, 200, rng);
  EXPECT_EQ(empty.mean, 0.0);
}

TEST(FocalSteps, PositiveDriftAtOneHalf) {
  const auto p = FrequencyVector::uniform(50, Borders::restricted);
  auto rng = umda::seed(6U, 0U);
  const auto d = umda::empirical_step_drift(p, 50, 100, 0, 25, 10000, rng);
  EXPECT_GT(d.mean, 0.0);
  EXPECT_GE(d.z, 5.0);
}

TEST(FocalSteps, Validation) {
  const auto p = FrequencyVector::uniform(10, Borders::restricted);
  auto rng = umda::seed(7U, 0U);
  EXPECT_THROW(umda::sample_next_focal_counts(p, 5, 10, 10, 2, 5, rng), umda::ContractViolation);
  EXPECT_THROW(umda::sample_next_focal_counts(p, 5, 10, 0, 6, 5, rng), umda::ContractViolation);
  EXPECT_THROW(umda::empirical_step_drift(p, 5, 10, 0, 2, 1, rng), umda::ContractViolation);
}

TEST(Dominance, ExcessOfExactBinomialSampleIsSmall) {
  // Samples drawn from Bin(20, 0.4) itself: the excess is within DKW slack.
  auto rng = umda::seed(8U, 0U);
  std::vector<std::size_t> samples(20000);
  for (auto& s : samples) {
    s = 0;
    for (int i = 0; i < 20; ++i) s += rng.bernoulli(0.4) ? 1U : 0U;
  }
  EXPECT_LE(umda::dominance_excess(samples, 20, 0.4), umda::dkw_epsilon(samples.size(), 0.001));
  // A sample shifted down by one is not dominated.
  for (auto& s : samples) s = s > 0 ? s - 1 : 0;
  EXPECT_GT(umda::dominance_excess(samples, 20, 0.4), 0.1);
  EXPECT_NEAR(umda::dkw_epsilon(10000, 0.001), 0.01949, 1e-5);
}

}  // namespace
