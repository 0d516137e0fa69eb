#pragma once

#include <cstdint>
#include <vector>

#include "invsim/bounds.hpp"
#include "invsim/engine.hpp"

namespace invsim::experiments {

// The bundled study configurations. Scale 1 is the full design (K = 10,000
// sample paths); desk runs default to scale 0.2.
inline constexpr std::uint64_t kDefaultSeed = 0x5eed0001u;
inline constexpr int kFullPaths = 10'000;

ProblemSpec reward_spread_spec(int periods, int cycles);  // r (5,8,10), lambda (.3,.2,.3,.2), h 2, L 2
ProblemSpec lookahead_spec(int periods, int cycles, int lead_time, double h,
                           const std::vector<double>& rewards, const std::vector<double>& lambda123);

std::vector<int> crossover_T_grid();   // {5, 10, 20, 50, 100}
std::vector<int> cycle_length_grid();  // {10, 20, 30, 50, 75, 100}

struct Table1Row {
  std::vector<double> rewards;
  std::vector<double> lambda123;  // lambda_1..lambda_3; lambda_0 = 0.2
  double h = 0.0;
};
std::vector<Table1Row> table1_grid();  // 18 rows

// Grid-search a policy parameter over the standard ranges: S in [0,(L+1)T],
// c in [0,T]; all candidates on identical paths.
std::pair<std::int64_t, RunSummary> optimize_policy(const ProblemSpec& spec,
                                                    ReplenishmentPolicy::Kind kind,
                                                    const FulfillmentAlgo& algo, int num_paths,
                                                    std::uint64_t seed, int threads);

// Two-stage CRN grid search over the same ranges: a strided pass followed by
// a unit-stride refinement around the best candidate. Every candidate sees
// identical paths, so the comparison noise is the same as the full sweep's.
std::pair<std::int64_t, RunSummary> coarse_refine_optimize(const RunConfig& cfg_template,
                                                           std::int64_t lo, std::int64_t hi,
                                                           std::int64_t stride, const SimOptions& opts);
std::pair<std::int64_t, RunSummary> optimize_policy_fast(const ProblemSpec& spec,
                                                         ReplenishmentPolicy::Kind kind,
                                                         const FulfillmentAlgo& algo, int num_paths,
                                                         std::uint64_t seed, int threads);

// Example scenario with one replenishment in flight: T = 2, N = 2,
// r = (1, 9, 10), lambda0 = 0.1, (lambda1..3) = (0.3, 0.3, 0.3), h = 0.5,
// I1 = 1, q2 = 1. Exact expected total profit under myopic offline
// fulfillment: 16.4669.
ProblemSpec two_cycle_example_spec();
PipelineState two_cycle_example_initial();
double two_cycle_example_value(const FulfillmentAlgo& algo);

// Measures the slack/interior-probability context for the combined bounds by
// grid search and simulation.
GapContext measure_gap_context(const ProblemSpec& spec, int num_paths, std::uint64_t seed,
                               int threads);

}  // namespace invsim::experiments
