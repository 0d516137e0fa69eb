#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "invsim/core.hpp"
#include "invsim/multires.hpp"
#include "invsim/stochastics.hpp"

namespace invsim {

// Regret-rate description of an online fulfillment algorithm: per-cycle
// regret at most C1*T^alpha. The Bayes Selector attains alpha = 0 with
// C1 = 2 r_M e^{-lambda_min} / lambda_min^2. C2 bounds the expected ending
// inventory gap (default C1/r_1), C3 its per-resource analogue (default
// C1/min positive reward difference). K_stability is the finite alpha = 1
// stability constant, exposed as a parameter because no value is available.
struct RegretModel {
  double alpha = 0.0;
  double C1 = 1.0;
  double C2 = 1.0;
  double C3 = 1.0;
  double K_stability = 1.0;

  static RegretModel bayes_selector_defaults(const ProblemSpec& spec);
  static RegretModel bayes_selector_defaults_multi(const MultiSpec& mspec);
};

// Named scalar results with every intermediate retained, in insertion order
// so serialization is reproducible byte for byte.
class BoundReport {
 public:
  void set(const std::string& name, double value);
  double get(const std::string& name) const;
  bool has(const std::string& name) const;
  void note(const std::string& text);

  const std::vector<std::pair<std::string, double>>& values() const { return values_; }
  const std::vector<std::string>& notes() const { return notes_; }

  nlohmann::ordered_json to_json() const;
  static BoundReport from_json(const nlohmann::ordered_json& j);
  std::string to_csv(double sweep_key) const;  // rows: key,bound_name,value

 private:
  std::vector<std::pair<std::string, double>> values_;
  std::vector<std::string> notes_;
};

// Expected end-of-cycle inventory after n cycles of a constant order c under
// myopic offline fulfillment: sum_{j<=n} (1/j) E[(jc - Binomial(jT,mu))^+].
double kingman_expected_inventory(int n_cycles, int periods_per_cycle, double lambda0, double c);

// Smallest integer S with cdf(S) >= phi.
std::int64_t backorder_fractile_level(const BinomialLaw& law, double phi);

struct FractileCost {
  double value = 0.0;
  std::int64_t level = 0;
  double fractile = 0.0;
};

// Backorder-cost envelopes of the lost-sales base-stock cost, evaluated at
// the critical-fractile levels (p+Lh)/(p+(L+1)h) and p/(p+(L+1)h) over the
// pipeline demand Binomial((L+1)T, 1-lambda0).
FractileCost a1_upper(int periods, double h, double p, int lead_time, double lambda0);
FractileCost a1_lower(int periods, double h, double p, int lead_time, double lambda0);

struct SeriesValue {
  double value = 0.0;
  double truncation_bound = 0.0;
  int terms = 0;
};

// Long-run average cost of a constant order c: the holding series plus
// p T(1-lambda0) - p c. Terms stop below 1e-12 with a Hoeffding tail
// certificate on the remainder. Requires c < T(1-lambda0).
SeriesValue constant_order_cost(int periods, double h, double p, double lambda0, double c);

struct CstarResult {
  double cstar = 0.0;
  double foc_residual = 0.0;
  double a2 = 0.0;
  double a2_truncation_bound = 0.0;
  int series_terms = 0;
};

// Solves sum_n Pr(Binomial(nT,mu) <= n c) = p/h for c by bisection on a
// continuized cdf (the unit step is packed into a narrow window left of each
// lattice point, so the root tracks the exact subgradient crossing), then
// evaluates the cost series there. Throws std::domain_error when the first-
// order condition has no root in (0, T(1-lambda0)).
CstarResult cstar_and_a2(int periods, double h, double p, double lambda0);

struct GapEnvelope {
  double lower = 0.0;
  double upper = 0.0;
};

// Two-sided bound on the base-stock minus constant-order long-run profit gap
// under myopic offline fulfillment.
GapEnvelope replenishment_gap_envelope(const ProblemSpec& spec);

struct OfflineGreedyConstants {
  std::vector<double> a_k;  // A_k for k = 2..M
  double a_min = 0.0;       // A
  double m1 = 0.0;          // sum_j sqrt(lambda_j (1 - lambda_j))
  double k2 = 0.5;
};

OfflineGreedyConstants offline_greedy_constants(const ProblemSpec& spec);

struct OfflineGreedyBounds {
  double upper = 0.0;
  double lower_all_T = 0.0;
  double lower_large_T = 0.0;
};

// delta_off / delta_greedy are the measured base-stock slacks
// (L+1)T(1-lambda0) - S for the two optimized levels; p_mid is the interior-
// event probability (supplied or estimated by simulation).
OfflineGreedyBounds offline_greedy_bounds(const ProblemSpec& spec, double delta_off,
                                          double delta_greedy, double p_mid);

double bennett_h(double u);  // (1+u)ln(1+u) - u

struct ThetaBound {
  bool vacuous = true;
  std::string reason;
  double theta_star = 0.0;
  double beta_star = 0.0;
  double theta_term = 0.0;  // -(e theta)^{-1} ln(1 - beta_theta)
};

// Minimizes the inventory-tail term over a log-spaced theta grid in
// (0, delta_c/(4(1-lambda0))]. A grid with no beta < 1 reports vacuous, not
// an error. Widening the grid can only lower the reported bound.
ThetaBound minimize_theta_term(int periods, double lambda0, double c, const RegretModel& model,
                               int grid_points = 200);

// Measured inputs for the combined replenishment-vs-fulfillment bounds.
struct GapContext {
  double delta_off = 0.0;
  double delta_greedy = 0.0;
  double p_mid = 0.0;
  double c_off = 0.0;  // optimized constant order entering the theta term
};

// Every regret envelope that is computable from the spec and model alone,
// plus the combined two-sided bound when a GapContext is supplied.
BoundReport regret_envelopes(const ProblemSpec& spec, const RegretModel& model,
                             const std::optional<GapContext>& ctx = std::nullopt);

// Multi-resource bound set; c_levels are the per-resource constant orders for
// the aggregate-inventory terms (omit to skip those rows).
BoundReport multires_bound_calculators(const MultiSpec& mspec, const RegretModel& model,
                                       const std::optional<std::vector<std::int64_t>>& c_levels = std::nullopt);

// Least-squares slope of log(y) against log(x); the slack-growth diagnostic.
double fit_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace invsim
