#include "umda/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "umda/error.hpp"
#include "umda/umda.hpp"

namespace umda {

namespace {

class KahanSum {
 public:
  void add(double x) noexcept {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const noexcept { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace

double PmfTable::cdf(std::size_t k) const {
  KahanSum s;
  for (std::size_t i = 0; i <= std::min(k, pmf.size() - 1); ++i) s.add(pmf[i]);
  return s.value();
}

double PmfTable::survival(std::size_t k) const {
  KahanSum s;
  for (std::size_t i = k; i < pmf.size(); ++i) s.add(pmf[i]);
  return s.value();
}

PmfTable poisson_binomial_pmf(std::span<const double> p) {
  PmfTable t;
  t.probabilities.assign(p.begin(), p.end());
  t.pmf.reserve(p.size() + 1);
  t.pmf.push_back(1.0);
  KahanSum mean;
  KahanSum var;
  for (const double q : p) {
    require(q >= 0.0 && q <= 1.0, "poisson_binomial_pmf: probability outside [0, 1]");
    t.pmf.push_back(0.0);
    for (std::size_t k = t.pmf.size() - 1; k > 0; --k) {
      t.pmf[k] = t.pmf[k] * (1.0 - q) + t.pmf[k - 1] * q;
    }
    t.pmf[0] *= 1.0 - q;
    mean.add(q);
    var.add(q * (1.0 - q));
  }
  t.mean = mean.value();
  t.variance = var.value();
  return t;
}

PmfMoments pmf_moments(std::span<const double> pmf) {
  KahanSum total;
  KahanSum first;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    total.add(pmf[k]);
    first.add(static_cast<double>(k) * pmf[k]);
  }
  PmfMoments m;
  m.total = total.value();
  m.mean = first.value();
  KahanSum second;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    const double dev = static_cast<double>(k) - m.mean;
    second.add(dev * dev * pmf[k]);
  }
  m.variance = second.value();
  return m;
}

ChunkBounds chunk_bounds(const PmfTable& pmf, double ell, double u) {
  require(ell > 0.0 && ell < 1.0 && u > 0.0 && u < 1.0, "chunk_bounds: ell, u must be in (0, 1)");
  require(ell + u < 1.0, "chunk_bounds: ell + u must be below 1");
  const std::size_t m = pmf.pmf.size() - 1;
  ChunkBounds b;
  b.ell = ell;
  b.u = u;
  b.k_ell = m;
  KahanSum below;
  for (std::size_t i = 0; i <= m; ++i) {
    below.add(pmf.pmf[i]);
    if (below.value() >= ell) {
      b.k_ell = i;
      break;
    }
  }
  b.k_u = 0;
  KahanSum above;
  for (std::size_t i = m + 1; i-- > 0;) {
    above.add(pmf.pmf[i]);
    if (above.value() >= u) {
      b.k_u = i;
      break;
    }
  }
  return b;
}

double verify_chunk_lower_bound(std::span<const double> p, double ell, double u) {
  const auto table = poisson_binomial_pmf(p);
  const auto b = chunk_bounds(table, ell, u);
  const double scale = std::max(1.0, std::sqrt(table.variance));
  double lowest = 1.0;
  for (std::size_t k = b.k_ell; k <= b.k_u; ++k) lowest = std::min(lowest, table.pmf[k]);
  return lowest * scale;
}

std::vector<double> binomial_pmf(std::size_t d, double p) {
  require(d <= 60, "binomial_pmf: d must be at most 60");
  require(p >= 0.0 && p <= 1.0, "binomial_pmf: probability outside [0, 1]");
  std::vector<double> out(d + 1);
  double coeff = 1.0;
  for (std::size_t k = 0; k <= d; ++k) {
    const double mass = coeff * std::pow(p, static_cast<double>(k)) *
                        std::pow(1.0 - p, static_cast<double>(d - k));
    out[k] = mass;
    coeff = coeff * static_cast<double>(d - k) / static_cast<double>(k + 1);
  }
  return out;
}

std::vector<double> binomial_cdf(std::size_t d, double p) {
  const auto pmf = binomial_pmf(d, p);
  std::vector<double> out(d + 1);
  KahanSum s;
  for (std::size_t k = 0; k <= d; ++k) {
    s.add(pmf[k]);
    out[k] = std::min(1.0, s.value());
  }
  return out;
}

double expected_min_capped_binomial(std::size_t c, std::size_t d, double p) {
  require(c >= 1 && c <= d, "expected_min_capped_binomial: need 1 <= C <= D");
  const auto pmf = binomial_pmf(d, p);
  KahanSum s;
  for (std::size_t k = 0; k <= d; ++k) s.add(static_cast<double>(std::min(c, k)) * pmf[k]);
  return s.value();
}

double capped_binomial_lower_bound(std::size_t c, std::size_t d, double p) {
  require(c >= 1 && c <= d, "capped_binomial_lower_bound: need 1 <= C <= D");
  const auto cd = static_cast<double>(c);
  return cd * p + 0.25 * p * (1.0 - p) * static_cast<double>(std::min(c, d - c));
}

std::vector<std::size_t> sample_next_focal_counts(const FrequencyVector& p, std::size_t mu,
                                                  std::size_t lambda, std::size_t focal_bit,
                                                  std::size_t x_t, std::size_t trials,
                                                  Pcg32& rng) {
  require(focal_bit < p.size(), "sample_next_focal_counts: focal bit out of range");
  require(x_t <= mu, "sample_next_focal_counts: x_t exceeds mu");
  require(lambda > mu && mu >= 1, "sample_next_focal_counts: need 1 <= mu < lambda");
  std::vector<double> values(p.values().begin(), p.values().end());
  values[focal_bit] = static_cast<double>(x_t) / static_cast<double>(mu);
  const FrequencyVector q(std::move(values), p.borders());
  const auto target = TargetString::all_ones(q.size());
  const PopulationSampler sampler(q);
  Population pop(q.size(), lambda);
  std::vector<std::size_t> out;
  out.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    sampler.sample_into(pop, rng, target);
    const auto rows = select_mu_best_indices(pop.fitness(), mu, rng);
    std::size_t ones = 0;
    for (const auto r : rows) ones += pop.bit(r, focal_bit) ? 1U : 0U;
    out.push_back(ones);
  }
  return out;
}

DriftEstimate empirical_step_drift(const FrequencyVector& p, std::size_t mu, std::size_t lambda,
                                   std::size_t focal_bit, std::size_t x_t, std::size_t trials,
                                   Pcg32& rng) {
  require(trials >= 2, "empirical_step_drift: need at least two trials");
  const auto counts = sample_next_focal_counts(p, mu, lambda, focal_bit, x_t, trials, rng);
  double sum = 0.0;
  for (const auto c : counts) sum += static_cast<double>(c) - static_cast<double>(x_t);
  const double n = static_cast<double>(trials);
  DriftEstimate e;
  e.mean = sum / n;
  double ss = 0.0;
  for (const auto c : counts) {
    const double dev = static_cast<double>(c) - static_cast<double>(x_t) - e.mean;
    ss += dev * dev;
  }
  e.stderr_mean = std::sqrt(ss / (n - 1.0) / n);
  e.z = e.stderr_mean > 0.0 ? e.mean / e.stderr_mean : 0.0;
  return e;
}

double dominance_excess(std::span<const std::size_t> samples, std::size_t mu, double prob) {
  require(!samples.empty(), "dominance_excess: empty sample");
  const auto reference = binomial_cdf(mu, prob);
  std::vector<std::size_t> histogram(mu + 1, 0);
  for (const auto s : samples) {
    require(s <= mu, "dominance_excess: sample exceeds mu");
    ++histogram[s];
  }
  double worst = -1.0;
  std::size_t running = 0;
  for (std::size_t k = 0; k <= mu; ++k) {
    running += histogram[k];
    const double empirical = static_cast<double>(running) / static_cast<double>(samples.size());
    worst = std::max(worst, empirical - reference[k]);
  }
  return worst;
}

double dkw_epsilon(std::size_t samples, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(samples)));
}

}  // namespace umda
