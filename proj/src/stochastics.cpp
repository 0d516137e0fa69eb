#include "invsim/stochastics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace invsim {

namespace {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = splitmix64(seed ^ 0x9e3779b97f4a7c15ULL);
  h = splitmix64(h ^ (a * 0xff51afd7ed558ccdULL));
  h = splitmix64(h ^ (b * 0xc4ceb9fe1a85ec53ULL));
  h = splitmix64(h ^ (c * 0xd6e8feb86659fd93ULL));
  return h;
}

double counter_uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t cycle, std::uint64_t period) {
  return static_cast<double>(counter_hash(seed, path, cycle, period) >> 11) * 0x1.0p-53;
}

ArrivalSampler::ArrivalSampler(const ProblemSpec& spec) {
  cumulative.resize(spec.arrival_probs.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < spec.arrival_probs.size(); ++j) {
    acc += spec.arrival_probs[j];
    cumulative[j] = acc;
  }
  if (!cumulative.empty()) cumulative.back() = 1.0;
}

int ArrivalSampler::draw(std::uint64_t seed, std::uint64_t path, std::uint64_t cycle0, std::uint64_t period0) const {
  double u = counter_uniform(seed, path, cycle0, period0);
  for (std::size_t j = 0; j < cumulative.size(); ++j)
    if (u < cumulative[j]) return static_cast<int>(j);
  return static_cast<int>(cumulative.size()) - 1;
}

ArrivalPath sample_path(const ProblemSpec& spec, const RngStream& stream, std::uint64_t path_index) {
  ArrivalPath path(spec.num_cycles, spec.periods_per_cycle);
  ArrivalSampler sampler(spec);
  for (int n = 1; n <= spec.num_cycles; ++n)
    for (int t = 1; t <= spec.periods_per_cycle; ++t)
      path.set(n, t, sampler.draw(stream.master_seed, path_index, n - 1, t - 1));
  return path;
}

double binom_log_pmf(const BinomialLaw& law, std::int64_t k) {
  if (k < 0 || k > law.trials) throw std::domain_error("binom_log_pmf: k outside [0, trials]");
  double p = law.success_prob;
  double n = static_cast<double>(law.trials);
  double kd = static_cast<double>(k);
  if (p <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return k == law.trials ? 0.0 : -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(n - kd + 1.0) +
         kd * std::log(p) + (n - kd) * std::log1p(-p);
}

double binom_pmf(const BinomialLaw& law, std::int64_t k) {
  double lp = binom_log_pmf(law, k);
  return std::isinf(lp) ? 0.0 : std::exp(lp);
}

double binom_cdf(const BinomialLaw& law, std::int64_t k) {
  if (k < 0) return 0.0;
  if (k >= law.trials) return 1.0;
  // Sum the shorter side. Terms fade fast past a few dozen standard
  // deviations; the absolute cutoff leaves a remainder below 1e-18 per term.
  const double cutoff = 1e-22;
  KahanSum sum;
  if (static_cast<double>(k) <= law.mean()) {
    for (std::int64_t i = k; i >= 0; --i) {
      double p = binom_pmf(law, i);
      sum.add(p);
      if (p < cutoff && static_cast<double>(i) < law.mean()) break;
    }
    return std::clamp(sum.value(), 0.0, 1.0);
  }
  for (std::int64_t i = k + 1; i <= law.trials; ++i) {
    double p = binom_pmf(law, i);
    sum.add(p);
    if (p < cutoff && static_cast<double>(i) > law.mean()) break;
  }
  return std::clamp(1.0 - sum.value(), 0.0, 1.0);
}

double binom_upper_partial(const BinomialLaw& law, double s) {
  if (s >= static_cast<double>(law.trials)) return 0.0;
  if (s < 0.0) return law.mean() - s;
  const double cutoff = 1e-22;
  std::int64_t start = static_cast<std::int64_t>(std::floor(s)) + 1;
  KahanSum sum;
  for (std::int64_t k = start; k <= law.trials; ++k) {
    double p = binom_pmf(law, k);
    sum.add((static_cast<double>(k) - s) * p);
    if (p < cutoff && static_cast<double>(k) > law.mean()) break;
  }
  return sum.value();
}

double binom_lower_partial(const BinomialLaw& law, double s) {
  if (s <= 0.0) return 0.0;
  if (s >= static_cast<double>(law.trials)) return s - law.mean();
  const double cutoff = 1e-22;
  std::int64_t start = static_cast<std::int64_t>(std::floor(s));
  if (static_cast<double>(start) == s) --start;  // strict overshoot carries zero weight at k == s
  KahanSum sum;
  for (std::int64_t k = std::min(start, law.trials); k >= 0; --k) {
    double p = binom_pmf(law, k);
    sum.add((s - static_cast<double>(k)) * p);
    if (p < cutoff && static_cast<double>(k) < law.mean()) break;
  }
  return sum.value();
}

double cum_demand_cdf(int n_cycles, int periods_per_cycle, double lambda0, double threshold) {
  if (n_cycles < 1) throw std::domain_error("cum_demand_cdf: n_cycles must be >= 1");
  BinomialLaw law{static_cast<std::int64_t>(n_cycles) * periods_per_cycle, 1.0 - lambda0};
  if (threshold < 0.0) return 0.0;
  return binom_cdf(law, static_cast<std::int64_t>(std::floor(threshold)));
}

}  // namespace invsim
