#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "invsim/core.hpp"
#include "invsim/fulfillment.hpp"
#include "invsim/replenishment.hpp"
#include "invsim/stochastics.hpp"

namespace invsim {

struct RunConfig {
  ProblemSpec spec;
  ReplenishmentPolicy policy;
  FulfillmentAlgo algo;
  int num_paths = 1;              // K
  std::uint64_t master_seed = 0;
  std::optional<PipelineState> initial;  // canonical cycle-1 state when supplied
  int burn_in_cycles = 0;                // defaults off: every cycle counts from n = 1
};

// Execution knobs; deliberately not part of the config hash so thread count
// or backend choice can never change what a run means.
struct SimOptions {
  int threads = 1;
  LpBackend lp_backend = LpBackend::Fast;
  bool capture_cycles = false;
};

struct RunSummary {
  double avg_profit_per_cycle = 0.0;
  double avg_profit_per_period = 0.0;
  double std_error = 0.0;  // sample std of per-path cycle averages / sqrt(K)
  std::vector<double> cycle_profit_mean;
  std::vector<double> cycle_ending_mean;
  std::vector<std::int64_t> accepted_by_type;
  std::uint64_t config_hash = 0;
  double runtime_ms = 0.0;

  // echoed config fields for serialization
  int periods_per_cycle = 0, num_cycles = 0, lead_time = 0, num_paths = 0, n_tilde = 0;
  std::string policy_name, algo_name;
  std::int64_t policy_param = 0;
  std::uint64_t seed = 0;

  static std::string csv_header();
  std::string csv_row() const;  // includes runtime_ms per the summary schema

  // Timing-free variants for experiment files that must reproduce byte for
  // byte across reruns and thread counts.
  static std::string csv_header_stable();
  std::string csv_row_stable() const;
};

void to_json(nlohmann::json& j, const RunSummary& s);

// Row-major [path][cycle] matrices captured when SimOptions::capture_cycles.
struct CycleMatrices {
  int num_paths = 0;
  int num_cycles = 0;
  std::vector<Money> profit;
  std::vector<std::int64_t> start_inventory;
  std::vector<std::int64_t> ending_inventory;

  std::size_t at(int path, int cycle) const {  // cycle 1-based
    return static_cast<std::size_t>(path) * num_cycles + (cycle - 1);
  }
};

struct SimResult {
  RunSummary summary;
  CycleMatrices cycles;
  LpCheckStats lp_stats;
};

std::uint64_t config_hash(const RunConfig& cfg);

// Monte Carlo over paths with common random numbers: path k always consumes
// stream (seed, k) no matter the policy or algorithm. Results are identical
// at any thread count: paths are integer-exact and reduced in path order.
RunSummary simulate(const RunConfig& cfg, const SimOptions& opts = {});
SimResult simulate_detailed(const RunConfig& cfg, const SimOptions& opts = {});

// Evaluates every integer parameter in [lo, hi] on identical paths and
// returns the argmax of avg_profit_per_cycle; ties go to the smallest value.
std::pair<std::int64_t, RunSummary> optimize_parameter(const RunConfig& cfg_template,
                                                       std::int64_t lo, std::int64_t hi,
                                                       const SimOptions& opts = {});

struct RegretReport {
  std::vector<double> per_cycle_gap;  // mean over matched paths of (off - on) profit
  double cumulative_gap = 0.0;
  struct Checkpoint {
    int cycle = 0;
    double gap = 0.0;
    double se = 0.0;
  };
  std::vector<Checkpoint> checkpoints;
};

void to_json(nlohmann::json& j, const RegretReport& r);

// Per-cycle profit gaps between two algorithms on identical paths. The two
// configs must share spec, policy, seed and K; only the algorithm differs.
RegretReport regret_series(const RunConfig& cfg_off, const RunConfig& cfg_on,
                           const SimOptions& opts = {},
                           std::span<const int> checkpoint_cycles = {});

// Exact expected total profit by enumerating every arrival grid, weighting by
// its probability, and running the deterministic dynamics. Orders arriving at
// later cycles come from the initial pipeline, then extra_orders, then the
// policy when one is given (zero otherwise). Requires (M+1)^(N*T) <= 1e6.
double exact_expectation(const ProblemSpec& spec, const std::optional<ReplenishmentPolicy>& policy,
                         const FulfillmentAlgo& algo, const PipelineState& initial,
                         std::span<const std::int64_t> extra_orders = {});

// Empirical Pr(T*lambda_M < I_1 <= T(1-lambda0) - slack) for the stationary
// start-of-cycle inventory under greedy fulfillment at base-stock S.
double estimate_interior_probability(const ProblemSpec& spec, std::int64_t s_level, double slack,
                                     int num_paths, std::uint64_t seed, int burn_in = 50,
                                     int sample_cycles = 50, int threads = 1);

}  // namespace invsim
