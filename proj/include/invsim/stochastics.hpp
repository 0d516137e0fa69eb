#pragma once

#include <cstdint>
#include <vector>

#include "invsim/core.hpp"

namespace invsim {

// Counter-based generation: the draw at (seed, path, cycle, period) is a pure
// function of those four values, so call order and thread schedule never
// change a sampled path. This is what makes common random numbers across
// policies exact rather than approximate.
struct RngStream {
  std::uint64_t master_seed = 0;
};

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);
double counter_uniform(std::uint64_t seed, std::uint64_t path, std::uint64_t cycle, std::uint64_t period);

// Cumulative arrival distribution in the fixed category order 0,1,..,M so tie
// behavior at boundaries is deterministic.
struct ArrivalSampler {
  explicit ArrivalSampler(const ProblemSpec& spec);
  int draw(std::uint64_t seed, std::uint64_t path, std::uint64_t cycle0, std::uint64_t period0) const;
  std::vector<double> cumulative;  // cumulative[j] = lambda_0 + .. + lambda_j
};

ArrivalPath sample_path(const ProblemSpec& spec, const RngStream& stream, std::uint64_t path_index);

struct BinomialLaw {
  std::int64_t trials = 0;
  double success_prob = 0.0;

  double mean() const { return static_cast<double>(trials) * success_prob; }
  double variance() const { return static_cast<double>(trials) * success_prob * (1.0 - success_prob); }
};

double binom_log_pmf(const BinomialLaw& law, std::int64_t k);
// Throws std::domain_error when k is outside [0, trials].
double binom_pmf(const BinomialLaw& law, std::int64_t k);
// Clamped: k < 0 -> 0, k >= trials -> 1. Compensated summation over the
// shorter tail keeps |sum pmf - 1| within 1e-10 even for thousands of trials.
double binom_cdf(const BinomialLaw& law, std::int64_t k);

// E[(K - s)^+] and E[(s - K)^+] for K ~ law and a real threshold s.
double binom_upper_partial(const BinomialLaw& law, double s);
double binom_lower_partial(const BinomialLaw& law, double s);

// Pr(Binomial(n_cycles*T, 1-lambda0) <= floor(threshold)).
double cum_demand_cdf(int n_cycles, int periods_per_cycle, double lambda0, double threshold);

// Kahan-compensated accumulator used by every tail sum in this module.
class KahanSum {
 public:
  void add(double x) {
    double y = x - compensation_;
    double t = total_ + y;
    compensation_ = (t - total_) - y;
    total_ = t;
  }
  double value() const { return total_; }

 private:
  double total_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace invsim
