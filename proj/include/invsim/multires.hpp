#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "invsim/core.hpp"
#include "invsim/engine.hpp"
#include "invsim/fulfillment.hpp"
#include "invsim/replenishment.hpp"

namespace invsim {

// d distinct resources; any arriving type j may be served from any resource l
// for reward r[j][l]. Lead times, holding costs and policies are per resource.
struct MultiSpec {
  int num_resources = 0;  // d
  int num_types = 0;      // M
  int periods_per_cycle = 0;
  int num_cycles = 0;
  std::vector<double> arrival_probs;        // lambda_0..lambda_M
  std::vector<std::vector<Money>> rewards;  // rewards[j-1][l], M rows x d cols
  std::vector<Money> holding;               // h_l > 0
  std::vector<int> lead_times;              // L_l

  double lambda0() const { return arrival_probs.empty() ? 1.0 : arrival_probs[0]; }
  double mu() const { return 1.0 - lambda0(); }
  double lambda(int type) const { return arrival_probs.at(static_cast<std::size_t>(type)); }
  Money reward(int type, int resource) const {
    return rewards.at(static_cast<std::size_t>(type - 1)).at(static_cast<std::size_t>(resource));
  }
  double reward_value(int type, int resource) const { return money_value(reward(type, resource)); }
  double resource_max_reward(int resource) const;  // r_{l,max}
  double max_reward() const;                       // r_max
  double max_holding() const;                      // h_max
  double lambda_min() const;
  double min_positive_reward_gap() const;  // smallest positive r difference across all pairs
};

std::vector<std::string> validate_multi(const MultiSpec& mspec);

// The d = 1 reduction as a single-resource instance.
ProblemSpec to_single(const MultiSpec& mspec);

struct MultiState {
  std::vector<std::int64_t> on_hand;
  std::vector<std::vector<std::int64_t>> in_flight;
};

// Serve from the in-stock resource with the highest reward for this type;
// ties take the smallest index. Returns the 0-based resource or -1 (reject:
// every resource is empty). Never rejects while any resource has stock.
int greedy_assign(int type, std::span<const std::int64_t> on_hand, const MultiSpec& mspec);

// Reward-maximal allocation of realized demand to resources, solved as a
// transportation LP. The optimum is integral by the constraint structure;
// the result is verified integral within 1e-9 and cast.
std::vector<std::vector<std::int64_t>> myopic_offline_assign(std::span<const std::int64_t> demand_counts,
                                                             std::span<const std::int64_t> inventories,
                                                             const MultiSpec& mspec);

// Component-wise look-ahead decision: per-resource current and nested
// pipeline capacities, demand splits shared across resources. Accepts when
// the total accepted mass for the arriving type covers at least the rejected
// mass; the serving resource carries the largest accepted mass, ties to the
// smallest index.
struct MultiDecision {
  bool accept = false;
  int resource = -1;  // 0-based
};

MultiDecision multi_lookahead_decide(const MultiSpec& mspec, int n_tilde,
                                     std::span<const std::int64_t> on_hand,
                                     std::span<const double> remaining_demand_now,
                                     std::span<const LookAheadContext> ctx_per_resource,
                                     int arriving_type, LpBackend backend = LpBackend::Fast,
                                     LpCheckStats* stats = nullptr);

struct MultiRunConfig {
  MultiSpec mspec;
  std::vector<ReplenishmentPolicy> policies;  // one per resource
  FulfillmentAlgo algo;
  int num_paths = 1;
  std::uint64_t master_seed = 0;
  std::optional<MultiState> initial;
};

// Multi-resource Monte Carlo. d = 1 delegates to the single-resource engine,
// so the reduction is exact by construction. Captured cycle matrices hold the
// totals across resources.
RunSummary simulate_multi(const MultiRunConfig& cfg, const SimOptions& opts = {});
SimResult simulate_multi_detailed(const MultiRunConfig& cfg, const SimOptions& opts = {});

void to_json(nlohmann::json& j, const MultiSpec& mspec);
void from_json(const nlohmann::json& j, MultiSpec& mspec);

}  // namespace invsim
