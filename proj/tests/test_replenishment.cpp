#include <doctest.h>

#include "invsim/engine.hpp"
#include "invsim/replenishment.hpp"

using namespace invsim;

namespace {

ProblemSpec spec_with_lead(int lead) {
  ProblemSpec spec;
  spec.num_types = 3;
  spec.periods_per_cycle = 10;
  spec.num_cycles = 40;
  spec.lead_time = lead;
  spec.rewards = {to_money(5), to_money(8), to_money(10)};
  spec.arrival_probs = {0.3, 0.2, 0.3, 0.2};
  spec.holding_cost = to_money(2);
  return spec;
}

}  // namespace

TEST_CASE("even-split initial states") {
  ProblemSpec spec = spec_with_lead(2);
  PipelineState s10 = initial_state(ReplenishmentPolicy::base_stock(10), spec);
  CHECK(s10.on_hand == 3);
  CHECK(s10.in_flight == std::vector<std::int64_t>{3, 4});

  PipelineState s9 = initial_state(ReplenishmentPolicy::base_stock(9), spec);
  CHECK(s9.on_hand == 3);
  CHECK(s9.in_flight == std::vector<std::int64_t>{3, 3});

  PipelineState c5 = initial_state(ReplenishmentPolicy::constant_order(5), 3);
  CHECK(c5.on_hand == 5);
  CHECK(c5.in_flight == std::vector<std::int64_t>{5, 5, 5});
}

TEST_CASE("place_order follows the position update") {
  auto bs = ReplenishmentPolicy::base_stock(10);
  CHECK(place_order(bs, {3, {2, 2}}) == 3);   // position 7
  CHECK(place_order(bs, {4, {3, 3}}) == 0);   // position 10
  CHECK_THROWS_AS(place_order(bs, {8, {2, 2}}), std::logic_error);
  CHECK(place_order(ReplenishmentPolicy::constant_order(4), {99, {1}}) == 4);
}

TEST_CASE("advance_cycle shifts the pipeline and appends the placed order") {
  PipelineState next = advance_cycle({7, {3, 4}}, 2, 1);
  CHECK(next.on_hand == 5);
  CHECK(next.in_flight == std::vector<std::int64_t>{4, 1});

  // L=1 bookkeeping: single arriving-next slot.
  PipelineState l1 = advance_cycle({5, {6}}, 0, 2);
  CHECK(l1.on_hand == 6);
  CHECK(l1.in_flight == std::vector<std::int64_t>{2});

  // Empty pipeline: the placed order arrives directly.
  PipelineState l0 = advance_cycle({5, {}}, 1, 7);
  CHECK(l0.on_hand == 8);
  CHECK(l0.in_flight.empty());
}

TEST_CASE("constant-order regime warning") {
  ProblemSpec spec = spec_with_lead(2);  // T(1-lambda0) = 7
  CHECK(policy_warnings(ReplenishmentPolicy::constant_order(5), spec).empty());
  CHECK(!policy_warnings(ReplenishmentPolicy::constant_order(7), spec).empty());
}

TEST_CASE("policy JSON round trip") {
  nlohmann::json j = ReplenishmentPolicy::base_stock(12);
  CHECK(j["kind"] == "base_stock");
  CHECK(j["S"] == 12);
  CHECK(j.get<ReplenishmentPolicy>() == ReplenishmentPolicy::base_stock(12));
  j = ReplenishmentPolicy::constant_order(4);
  CHECK(j["kind"] == "constant_order");
  CHECK(j.get<ReplenishmentPolicy>() == ReplenishmentPolicy::constant_order(4));
  nlohmann::json unknown{{"kind", "sS"}};
  CHECK_THROWS_AS(unknown.get<ReplenishmentPolicy>(), std::invalid_argument);
}

TEST_CASE("constant-order arriving orders equal c on every simulated cycle") {
  // The engine enforces the base-stock position invariant internally; here we
  // check the constant-order counterpart: the summary is insensitive to the
  // initial on-hand level within Monte Carlo error once N is large.
  ProblemSpec spec = spec_with_lead(1);
  spec.num_cycles = 350;
  RunConfig cfg;
  cfg.spec = spec;
  cfg.policy = ReplenishmentPolicy::constant_order(5);
  cfg.algo = FulfillmentAlgo::greedy();
  cfg.num_paths = 400;
  cfg.master_seed = 2024;
  cfg.burn_in_cycles = 50;  // drop the transient that the initial stock biases

  RunSummary base = simulate(cfg);
  RunConfig alt = cfg;
  alt.initial = PipelineState{11, {5}};
  RunSummary shifted = simulate(alt);
  double combined_se = std::sqrt(base.std_error * base.std_error +
                                 shifted.std_error * shifted.std_error);
  CHECK(std::abs(base.avg_profit_per_cycle - shifted.avg_profit_per_cycle) <= 3.0 * combined_se + 0.02);
}
