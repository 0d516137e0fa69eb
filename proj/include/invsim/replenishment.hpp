#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "invsim/core.hpp"

namespace invsim {

struct ReplenishmentPolicy {
  enum class Kind { BaseStock, ConstantOrder };
  Kind kind = Kind::BaseStock;
  std::int64_t level = 0;  // S for base-stock, c for constant-order

  static ReplenishmentPolicy base_stock(std::int64_t s) { return {Kind::BaseStock, s}; }
  static ReplenishmentPolicy constant_order(std::int64_t c) { return {Kind::ConstantOrder, c}; }
  bool is_base_stock() const { return kind == Kind::BaseStock; }

  bool operator==(const ReplenishmentPolicy&) const = default;
};

// Warnings, not rejections: constant-order bound analysis assumes the regime
// 0 <= c < T(1 - lambda0).
std::vector<std::string> policy_warnings(const ReplenishmentPolicy& policy, const ProblemSpec& spec);

// Canonical post-order state for cycle 1. Base-stock uses the even pipeline
// that exactly hits the target position: on_hand = floor(S/(L+1)), L-1 equal
// pipeline entries, and the cycle-1 order closing the position to S as the
// last in-flight entry. Constant-order starts at on_hand = c with a full
// pipeline of c. L = 0 keeps one slot for the order arriving next cycle.
PipelineState initial_state(const ReplenishmentPolicy& policy, const ProblemSpec& spec);
PipelineState initial_state(const ReplenishmentPolicy& policy, int lead_time);

// Order placed given the pre-order state (after arrival and shift). Base-stock
// returns S - position and throws std::logic_error when the position already
// exceeds S, which cannot happen under correct dynamics.
std::int64_t place_order(const ReplenishmentPolicy& policy, const PipelineState& state);

// End-of-cycle transition: the first in-flight entry arrives, the pipeline
// shifts left, and the provided order is appended. With an empty pipeline the
// placed order arrives directly.
PipelineState advance_cycle(const PipelineState& state, std::int64_t ending_inventory, std::int64_t placed_order);

void to_json(nlohmann::json& j, const ReplenishmentPolicy& p);
void from_json(const nlohmann::json& j, ReplenishmentPolicy& p);

}  // namespace invsim
