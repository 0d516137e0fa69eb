#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "invsim/core.hpp"
#include "invsim/lpsolve.hpp"

namespace invsim {

// The Bayes Selector is LookaheadOnline with zero look-ahead cycles.
struct FulfillmentAlgo {
  enum class Kind { GreedyOnline, MyopicOffline, LookaheadOnline, LookaheadOffline };
  Kind kind = Kind::GreedyOnline;
  int n_tilde = 0;

  static FulfillmentAlgo greedy() { return {Kind::GreedyOnline, 0}; }
  static FulfillmentAlgo myopic_offline() { return {Kind::MyopicOffline, 0}; }
  static FulfillmentAlgo bayes_selector() { return {Kind::LookaheadOnline, 0}; }
  static FulfillmentAlgo lookahead_online(int n) { return {Kind::LookaheadOnline, n}; }
  static FulfillmentAlgo lookahead_offline(int n) { return {Kind::LookaheadOffline, n}; }

  bool is_resolving() const {
    return kind == Kind::LookaheadOnline || kind == Kind::LookaheadOffline;
  }
  bool uses_realized_demand() const { return kind == Kind::LookaheadOffline; }
  std::string name() const;

  bool operator==(const FulfillmentAlgo&) const = default;
};

std::vector<std::string> algo_warnings(const FulfillmentAlgo& algo, const ProblemSpec& spec);

enum class LpBackend { Fast, Certified };

// Populated in Certified mode: every solve is cross-checked against the
// simplex certificate and the two backends' objectives compared.
struct LpCheckStats {
  long long solves = 0;
  double max_gap_ratio = 0.0;      // duality gap / (1 + |objective|)
  double max_backend_diff = 0.0;   // |greedy - simplex| objective
};

// Accepts every arriving customer while stock lasts.
void run_cycle_greedy(const ProblemSpec& spec, std::int64_t start_inventory,
                      std::span<const int> arrivals, CycleResult& out);
CycleResult run_cycle_greedy(const ProblemSpec& spec, std::int64_t start_inventory,
                             std::span<const int> arrivals);

// Clairvoyant within the cycle: serves realized demand from the highest
// reward down. demand_counts[j-1] = D_j over the whole cycle.
void run_cycle_myopic_offline(const ProblemSpec& spec, std::int64_t start_inventory,
                              std::span<const std::int64_t> demand_counts, CycleResult& out);
CycleResult run_cycle_myopic_offline(const ProblemSpec& spec, std::int64_t start_inventory,
                                     std::span<const std::int64_t> demand_counts);

// Re-solves the look-ahead packing LP each period and applies the accept rule
// v >= v0 at the selected optimum (ties accept). Reuses one workspace across
// calls; the objective and row pattern are fixed by (spec, n_tilde), so the
// allocation order is sorted once.
class LookaheadResolver {
 public:
  LookaheadResolver(const ProblemSpec& spec, int n_tilde);

  bool decide(std::int64_t on_hand, std::span<const double> remaining_demand_now,
              const LookAheadContext& ctx, int arriving_type,
              LpBackend backend = LpBackend::Fast, LpCheckStats* stats = nullptr);

  const LookaheadLp& lp() const { return lp_; }

 private:
  friend void run_cycle_resolving(const ProblemSpec&, const FulfillmentAlgo&, std::int64_t,
                                  std::span<const int>, const LookAheadContext&, LookaheadResolver&,
                                  CycleResult&, LpBackend, LpCheckStats*);
  const ProblemSpec* spec_;
  int n_tilde_;
  LookaheadLp lp_;
  StaircaseWorkspace stair_;
  std::vector<double> x_;
  std::vector<double> remaining_buf_;
  std::vector<std::int64_t> suffix_buf_;
};

// One-shot form of the same decision.
bool lookahead_decide(const ProblemSpec& spec, int n_tilde, std::int64_t on_hand,
                      std::span<const double> remaining_demand_now, const LookAheadContext& ctx,
                      int arriving_type, LpBackend backend = LpBackend::Fast,
                      LpCheckStats* stats = nullptr);

// Runs one cycle of a resolving algorithm (Bayes Selector or either
// look-ahead variant). The online variants feed expected remaining demand
// (T-t+1)*lambda_j; the offline look-ahead feeds realized D_j[t,T].
void run_cycle_resolving(const ProblemSpec& spec, const FulfillmentAlgo& algo,
                         std::int64_t start_inventory, std::span<const int> arrivals,
                         const LookAheadContext& ctx, LookaheadResolver& resolver, CycleResult& out,
                         LpBackend backend = LpBackend::Fast, LpCheckStats* stats = nullptr);
CycleResult run_cycle_resolving(const ProblemSpec& spec, const FulfillmentAlgo& algo,
                                std::int64_t start_inventory, std::span<const int> arrivals,
                                const LookAheadContext& ctx, LookaheadResolver& resolver,
                                LpBackend backend = LpBackend::Fast, LpCheckStats* stats = nullptr);

void to_json(nlohmann::json& j, const FulfillmentAlgo& a);
void from_json(const nlohmann::json& j, FulfillmentAlgo& a);

}  // namespace invsim
