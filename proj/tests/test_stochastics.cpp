#include <doctest.h>

#include <cmath>
#include <random>

#include "invsim/stochastics.hpp"

using namespace invsim;

namespace {

// Test-only spec builder that skips validation so degenerate lambdas are allowed.
ProblemSpec raw_spec(std::vector<double> lambda, int cycles, int periods) {
  ProblemSpec spec;
  spec.num_types = static_cast<int>(lambda.size()) - 1;
  spec.periods_per_cycle = periods;
  spec.num_cycles = cycles;
  spec.lead_time = 0;
  for (int j = 0; j < spec.num_types; ++j) spec.rewards.push_back(to_money(j + 1));
  spec.arrival_probs = std::move(lambda);
  spec.holding_cost = to_money(1);
  return spec;
}

}  // namespace

TEST_CASE("counter-based draws are pure functions of their coordinates") {
  ProblemSpec spec = raw_spec({0.3, 0.2, 0.3, 0.2}, 5, 7);
  RngStream stream{123456789};
  ArrivalPath a = sample_path(spec, stream, 42);
  ArrivalPath b = sample_path(spec, stream, 42);
  ArrivalSampler sampler(spec);
  std::mt19937_64 rng(3);
  std::vector<std::pair<int, int>> coords;
  for (int n = 1; n <= 5; ++n)
    for (int t = 1; t <= 7; ++t) coords.emplace_back(n, t);
  std::shuffle(coords.begin(), coords.end(), rng);
  for (auto [n, t] : coords) {
    CHECK(a.at(n, t) == b.at(n, t));
    CHECK(sampler.draw(stream.master_seed, 42, static_cast<std::uint64_t>(n - 1),
                       static_cast<std::uint64_t>(t - 1)) == a.at(n, t));
  }
  ArrivalPath other = sample_path(spec, stream, 43);
  bool any_diff = false;
  for (int n = 1; n <= 5; ++n)
    for (int t = 1; t <= 7; ++t) any_diff = any_diff || other.at(n, t) != a.at(n, t);
  CHECK(any_diff);
}

TEST_CASE("degenerate lambdas produce degenerate grids") {
  ProblemSpec all_empty = raw_spec({1.0, 0.0, 0.0}, 3, 4);
  ArrivalPath path = sample_path(all_empty, {9}, 0);
  for (int n = 1; n <= 3; ++n)
    for (int t = 1; t <= 4; ++t) CHECK(path.at(n, t) == 0);

  ProblemSpec always = raw_spec({0.0, 0.5, 0.5}, 3, 4);
  ArrivalPath busy = sample_path(always, {9}, 0);
  for (int n = 1; n <= 3; ++n)
    for (int t = 1; t <= 4; ++t) CHECK(busy.at(n, t) != 0);
}

TEST_CASE("empirical type frequencies match lambda within 4 sigma") {
  ProblemSpec spec = raw_spec({0.3, 0.2, 0.3, 0.2}, 1, 1);
  ArrivalSampler sampler(spec);
  const int draws = 1'000'000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < draws; ++i)
    ++counts[static_cast<std::size_t>(sampler.draw(777, static_cast<std::uint64_t>(i), 0, 0))];
  for (int j = 0; j <= 3; ++j) {
    double p = spec.arrival_probs[static_cast<std::size_t>(j)];
    double sigma = std::sqrt(p * (1 - p) / draws);
    CHECK(std::abs(static_cast<double>(counts[static_cast<std::size_t>(j)]) / draws - p) <= 4 * sigma);
  }
}

TEST_CASE("simulated cycle demand matches binomial moments within 4 sigma") {
  ProblemSpec spec = raw_spec({0.3, 0.2, 0.3, 0.2}, 1, 20);
  ArrivalSampler sampler(spec);
  const int cycles = 100'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int n = 0; n < cycles; ++n) {
    int d = 0;
    for (int t = 0; t < 20; ++t)
      d += sampler.draw(31, 0, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t)) != 0;
    sum += d;
    sum_sq += static_cast<double>(d) * d;
  }
  double mean = sum / cycles;
  double var = sum_sq / cycles - mean * mean;
  double want_mean = 20 * 0.7, want_var = 20 * 0.7 * 0.3;
  CHECK(std::abs(mean - want_mean) <= 4 * std::sqrt(want_var / cycles));
  // Variance of the sample variance for a binomial: close enough to 2 var^2 / n.
  CHECK(std::abs(var - want_var) <= 4 * std::sqrt(2.0 * want_var * want_var / cycles));
}

TEST_CASE("binomial pmf and cdf basics") {
  CHECK(binom_pmf({2, 0.5}, 1) == doctest::Approx(0.5).epsilon(1e-12));
  // L=1, T=2, lambda0=0.3: four trials at success 0.7, all successes.
  CHECK(binom_pmf({4, 0.7}, 4) == doctest::Approx(0.2401).epsilon(1e-12));
  CHECK(binom_cdf({10, 0.4}, 10) == 1.0);
  CHECK(binom_cdf({10, 0.4}, -1) == 0.0);
  CHECK_THROWS_AS(binom_pmf({10, 0.4}, 11), std::domain_error);
  CHECK_THROWS_AS(binom_pmf({10, 0.4}, -1), std::domain_error);
}

TEST_CASE("pmf sums to one and cdf is nondecreasing, including large laws") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> prob(0.05, 0.95);
  for (std::int64_t trials : {6LL, 40LL, 400LL, 4800LL}) {
    BinomialLaw law{trials, prob(rng)};
    KahanSum total;
    double prev_cdf = 0.0;
    for (std::int64_t k = 0; k <= trials; ++k) {
      total.add(binom_pmf(law, k));
      double c = binom_cdf(law, k);
      CHECK(c >= prev_cdf - 1e-15);
      prev_cdf = c;
    }
    CHECK(std::abs(total.value() - 1.0) <= 1e-10);
    CHECK(binom_cdf(law, trials) == 1.0);
  }
}

TEST_CASE("partial expectations match direct sums") {
  BinomialLaw law{12, 0.6};
  for (double s : {0.0, 1.5, 4.0, 7.2, 12.0, 15.0}) {
    double upper = 0.0, lower = 0.0;
    for (std::int64_t k = 0; k <= 12; ++k) {
      double p = binom_pmf(law, k);
      upper += std::max(static_cast<double>(k) - s, 0.0) * p;
      lower += std::max(s - static_cast<double>(k), 0.0) * p;
    }
    CHECK(binom_upper_partial(law, s) == doctest::Approx(upper).epsilon(1e-10));
    CHECK(binom_lower_partial(law, s) == doctest::Approx(lower).epsilon(1e-10));
  }
}

TEST_CASE("cumulative demand cdf matches exhaustive enumeration") {
  CHECK(cum_demand_cdf(2, 3, 0.5, -0.5) == 0.0);
  CHECK(cum_demand_cdf(2, 3, 0.5, 6.0) == 1.0);
  // n=2, T=3, lambda0=0.5: Binomial(6, 0.5) at 3; enumerate all 2^6 outcomes.
  int favorable = 0;
  for (int mask = 0; mask < 64; ++mask) favorable += __builtin_popcount(mask) <= 3;
  CHECK(cum_demand_cdf(2, 3, 0.5, 3.0) == doctest::Approx(favorable / 64.0).epsilon(1e-12));
}
