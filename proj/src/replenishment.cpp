#include "invsim/replenishment.hpp"

#include <stdexcept>

namespace invsim {

std::vector<std::string> policy_warnings(const ReplenishmentPolicy& policy, const ProblemSpec& spec) {
  std::vector<std::string> out;
  if (policy.level < 0) out.push_back("policy level must be nonnegative");
  if (policy.kind == ReplenishmentPolicy::Kind::ConstantOrder) {
    double mean_demand = static_cast<double>(spec.periods_per_cycle) * spec.mu();
    if (static_cast<double>(policy.level) >= mean_demand)
      out.push_back("constant order c >= T(1-lambda0): outside the regime the bound analysis assumes");
  }
  return out;
}

PipelineState initial_state(const ReplenishmentPolicy& policy, const ProblemSpec& spec) {
  return initial_state(policy, spec.lead_time);
}

PipelineState initial_state(const ReplenishmentPolicy& policy, int lead_time) {
  const int lead = lead_time;
  PipelineState state;
  if (policy.kind == ReplenishmentPolicy::Kind::ConstantOrder) {
    state.on_hand = policy.level;
    state.in_flight.assign(static_cast<std::size_t>(std::max(lead, 1)), policy.level);
    return state;
  }
  const std::int64_t s = policy.level;
  const std::int64_t share = s / (lead + 1);
  state.on_hand = share;
  if (lead == 0) {
    state.in_flight = {s - share};  // zero: position already at target
    return state;
  }
  state.in_flight.assign(static_cast<std::size_t>(lead - 1), share);
  state.in_flight.push_back(s - share * lead);  // cycle-1 order closes the position to S
  return state;
}

std::int64_t place_order(const ReplenishmentPolicy& policy, const PipelineState& state) {
  if (policy.kind == ReplenishmentPolicy::Kind::ConstantOrder) return policy.level;
  std::int64_t gap = policy.level - inventory_position(state);
  if (gap < 0)
    throw std::logic_error("base-stock invariant violated: inventory position exceeds S");
  return gap;
}

PipelineState advance_cycle(const PipelineState& state, std::int64_t ending_inventory, std::int64_t placed_order) {
  PipelineState next;
  if (state.in_flight.empty()) {
    next.on_hand = ending_inventory + placed_order;
    return next;
  }
  next.on_hand = ending_inventory + state.in_flight.front();
  next.in_flight.assign(state.in_flight.begin() + 1, state.in_flight.end());
  next.in_flight.push_back(placed_order);
  return next;
}

void to_json(nlohmann::json& j, const ReplenishmentPolicy& p) {
  if (p.kind == ReplenishmentPolicy::Kind::BaseStock)
    j = nlohmann::json{{"kind", "base_stock"}, {"S", p.level}};
  else
    j = nlohmann::json{{"kind", "constant_order"}, {"c", p.level}};
}

void from_json(const nlohmann::json& j, ReplenishmentPolicy& p) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "base_stock") {
    p.kind = ReplenishmentPolicy::Kind::BaseStock;
    p.level = j.at("S").get<std::int64_t>();
  } else if (kind == "constant_order") {
    p.kind = ReplenishmentPolicy::Kind::ConstantOrder;
    p.level = j.at("c").get<std::int64_t>();
  } else {
    throw std::invalid_argument("unknown replenishment policy kind: " + kind);
  }
}

}  // namespace invsim
