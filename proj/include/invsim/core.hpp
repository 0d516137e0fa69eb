#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace invsim {

// Money is held in integer micro-units so per-cycle profit identities are
// exact and runs reproduce bit-for-bit across platforms.
using Money = std::int64_t;
inline constexpr Money kMoneyScale = 1'000'000;

inline Money to_money(double value) {
  return static_cast<Money>(std::llround(value * static_cast<double>(kMoneyScale)));
}
inline double money_value(Money m) { return static_cast<double>(m) / static_cast<double>(kMoneyScale); }

// Single-resource problem instance: M customer types with strictly increasing
// rewards, T periods per replenishment cycle, N cycles, lead time L (cycles),
// arrival probabilities lambda[0..M] with lambda[0] = no-arrival.
struct ProblemSpec {
  int num_types = 0;          // M
  int periods_per_cycle = 0;  // T
  int num_cycles = 0;         // N
  int lead_time = 0;          // L
  std::vector<Money> rewards; // r_1..r_M (index j-1)
  std::vector<double> arrival_probs; // lambda_0..lambda_M
  Money holding_cost = 0;     // h, per unit left at cycle end

  double lambda0() const { return arrival_probs.empty() ? 1.0 : arrival_probs[0]; }
  double mu() const { return 1.0 - lambda0(); }
  double lambda(int type) const { return arrival_probs.at(static_cast<std::size_t>(type)); }
  Money reward(int type) const { return rewards.at(static_cast<std::size_t>(type - 1)); }
  double reward_value(int type) const { return money_value(reward(type)); }
  double holding_value() const { return money_value(holding_cost); }
  double lambda_min() const;  // min over customer types 1..M
};

// Every violated invariant, empty when valid. Tolerance on the probability
// normalization is 1e-12; out-of-tolerance vectors are rejected, never
// silently renormalized.
std::vector<std::string> validate(const ProblemSpec& spec);

inline void require_valid(const ProblemSpec& spec) {
  auto v = validate(spec);
  if (!v.empty()) throw std::invalid_argument("invalid ProblemSpec: " + v.front());
}

// On-hand inventory plus in-flight replenishment orders; in_flight[i] arrives
// i+1 cycles from now. Right after ordering the vector holds L entries (the
// just-placed order last) and the inventory position equals the base-stock
// target under that policy.
struct PipelineState {
  std::int64_t on_hand = 0;
  std::vector<std::int64_t> in_flight;

  bool operator==(const PipelineState&) const = default;
};

std::int64_t inventory_position(const PipelineState& state);

// Realized arrival type per (cycle, period); 0 means no arrival.
class ArrivalPath {
 public:
  ArrivalPath(int num_cycles, int periods_per_cycle)
      : num_cycles_(num_cycles), periods_(periods_per_cycle),
        cells_(static_cast<std::size_t>(num_cycles) * periods_per_cycle, 0) {}

  int num_cycles() const { return num_cycles_; }
  int periods_per_cycle() const { return periods_; }

  int at(int cycle, int period) const { return cells_[index(cycle, period)]; }
  void set(int cycle, int period, int type) { cells_[index(cycle, period)] = static_cast<std::uint8_t>(type); }

  // D_j over the inclusive period window [t1, t2] of one cycle (1-based).
  std::int64_t demand_count(int type, int cycle, int t1, int t2) const;

 private:
  std::size_t index(int cycle, int period) const {
    return static_cast<std::size_t>(cycle - 1) * periods_ + (period - 1);
  }
  int num_cycles_;
  int periods_;
  std::vector<std::uint8_t> cells_;
};

// Per-cycle accounting. rejected_choice[j] counts customers turned away while
// stock was on hand, rejected_stockout[j] those lost to an empty shelf.
struct CycleResult {
  Money reward = 0;
  Money holding = 0;
  std::int64_t start_inventory = 0;
  std::int64_t ending_inventory = 0;
  std::vector<std::int64_t> accepted;          // by type, index j-1
  std::vector<std::int64_t> rejected_choice;
  std::vector<std::int64_t> rejected_stockout;

  explicit CycleResult(int num_types = 0)
      : accepted(num_types, 0), rejected_choice(num_types, 0), rejected_stockout(num_types, 0) {}

  // Clears for reuse without releasing capacity.
  void reset(int num_types) {
    reward = holding = 0;
    start_inventory = ending_inventory = 0;
    accepted.assign(static_cast<std::size_t>(num_types), 0);
    rejected_choice.assign(static_cast<std::size_t>(num_types), 0);
    rejected_stockout.assign(static_cast<std::size_t>(num_types), 0);
  }

  std::int64_t rejected(int type) const {
    return rejected_choice[type - 1] + rejected_stockout[type - 1];
  }
  std::int64_t lost(int type) const { return rejected_stockout[type - 1]; }
  Money profit() const { return reward - holding; }
};

void to_json(nlohmann::json& j, const ProblemSpec& spec);
void from_json(const nlohmann::json& j, ProblemSpec& spec);

ProblemSpec spec_from_json_text(const std::string& text);
std::string spec_to_json_text(const ProblemSpec& spec);

}  // namespace invsim
