#include "invsim/fulfillment.hpp"

#include <algorithm>
#include <cmath>

namespace invsim {

std::string FulfillmentAlgo::name() const {
  switch (kind) {
    case Kind::GreedyOnline: return "greedy";
    case Kind::MyopicOffline: return "myopic_offline";
    case Kind::LookaheadOnline: return n_tilde == 0 ? "bayes_selector" : "lookahead_online_" + std::to_string(n_tilde);
    case Kind::LookaheadOffline: return "lookahead_offline_" + std::to_string(n_tilde);
  }
  return "unknown";
}

std::vector<std::string> algo_warnings(const FulfillmentAlgo& algo, const ProblemSpec& spec) {
  std::vector<std::string> out;
  if (algo.n_tilde < 0) out.push_back("n_tilde must be nonnegative");
  if (algo.is_resolving() && algo.n_tilde > spec.lead_time)
    out.push_back("n_tilde exceeds the lead time: orders beyond the pipeline are taken as zero");
  return out;
}

void run_cycle_greedy(const ProblemSpec& spec, std::int64_t start_inventory,
                      std::span<const int> arrivals, CycleResult& result) {
  result.reset(spec.num_types);
  result.start_inventory = start_inventory;
  std::int64_t on_hand = start_inventory;
  for (int type : arrivals) {
    if (type == 0) continue;
    if (on_hand > 0) {
      --on_hand;
      result.reward += spec.reward(type);
      ++result.accepted[type - 1];
    } else {
      ++result.rejected_stockout[type - 1];
    }
  }
  result.ending_inventory = on_hand;
  result.holding = spec.holding_cost * on_hand;
}

CycleResult run_cycle_greedy(const ProblemSpec& spec, std::int64_t start_inventory,
                             std::span<const int> arrivals) {
  CycleResult result(spec.num_types);
  run_cycle_greedy(spec, start_inventory, arrivals, result);
  return result;
}

void run_cycle_myopic_offline(const ProblemSpec& spec, std::int64_t start_inventory,
                              std::span<const std::int64_t> demand_counts, CycleResult& result) {
  result.reset(spec.num_types);
  result.start_inventory = start_inventory;
  std::int64_t left = start_inventory;
  for (int j = spec.num_types; j >= 1; --j) {
    std::int64_t take = std::min(left, demand_counts[static_cast<std::size_t>(j - 1)]);
    left -= take;
    result.accepted[j - 1] = take;
    std::int64_t missed = demand_counts[static_cast<std::size_t>(j - 1)] - take;
    if (start_inventory == 0)
      result.rejected_stockout[j - 1] = missed;
    else
      result.rejected_choice[j - 1] = missed;
  }
  result.ending_inventory = left;
  for (int j = 1; j <= spec.num_types; ++j) result.reward += spec.reward(j) * result.accepted[j - 1];
  result.holding = spec.holding_cost * left;
}

CycleResult run_cycle_myopic_offline(const ProblemSpec& spec, std::int64_t start_inventory,
                                     std::span<const std::int64_t> demand_counts) {
  CycleResult result(spec.num_types);
  run_cycle_myopic_offline(spec, start_inventory, demand_counts, result);
  return result;
}

LookaheadResolver::LookaheadResolver(const ProblemSpec& spec, int n_tilde)
    : spec_(&spec), n_tilde_(n_tilde) {
  std::vector<double> zeros(static_cast<std::size_t>(spec.num_types), 0.0);
  lp_ = build_lookahead_lp(spec, n_tilde, 0, zeros, LookAheadContext{});
  staircase_sort(lp_, stair_);
  x_.resize(static_cast<std::size_t>(lp_.problem.num_vars()));
}

bool LookaheadResolver::decide(std::int64_t on_hand, std::span<const double> remaining_demand_now,
                               const LookAheadContext& ctx, int arriving_type,
                               LpBackend backend, LpCheckStats* stats) {
  if (on_hand <= 0) return false;

  const int m_types = lp_.num_types;
  for (int j = 1; j <= m_types; ++j)
    lp_.problem.upper_bounds[lp_.current_var(j)] = remaining_demand_now[static_cast<std::size_t>(j - 1)];
  double cap = static_cast<double>(on_hand);
  for (int k = 0; k < lp_.num_stages; ++k) {
    if (k >= 1) cap += static_cast<double>(ctx.order(k));
    lp_.problem.row_upper[k] = cap;
  }
  lp_.reported_constant =
      -spec_->holding_value() * static_cast<double>(n_tilde_) * static_cast<double>(on_hand);

  double objective = staircase_solve(lp_, stair_, x_);

  if (backend == LpBackend::Certified) {
    LpSolution reference = solve_lp(lp_.problem);
    double scale = 1.0 + std::abs(reference.objective_value);
    double gap_ratio = reference.duality_gap / scale;
    double diff = std::abs(reference.objective_value - objective);
    if (stats) {
      ++stats->solves;
      stats->max_gap_ratio = std::max(stats->max_gap_ratio, gap_ratio);
      stats->max_backend_diff = std::max(stats->max_backend_diff, diff);
    }
    if (gap_ratio > kLpGapTol)
      throw LpError("lookahead LP certificate failed: duality gap too large", dump_lp(lp_.problem));
    if (diff > kLpGapTol * scale)
      throw LpError("lookahead LP backends disagree", dump_lp(lp_.problem));
  }

  double accepted_mass = x_[static_cast<std::size_t>(lp_.current_var(arriving_type))];
  double rejected_mass = remaining_demand_now[static_cast<std::size_t>(arriving_type - 1)] - accepted_mass;
  return accepted_mass >= rejected_mass - 1e-9;
}

bool lookahead_decide(const ProblemSpec& spec, int n_tilde, std::int64_t on_hand,
                      std::span<const double> remaining_demand_now, const LookAheadContext& ctx,
                      int arriving_type, LpBackend backend, LpCheckStats* stats) {
  LookaheadResolver resolver(spec, n_tilde);
  return resolver.decide(on_hand, remaining_demand_now, ctx, arriving_type, backend, stats);
}

void run_cycle_resolving(const ProblemSpec& spec, const FulfillmentAlgo& algo,
                         std::int64_t start_inventory, std::span<const int> arrivals,
                         const LookAheadContext& ctx, LookaheadResolver& resolver, CycleResult& result,
                         LpBackend backend, LpCheckStats* stats) {
  const int m_types = spec.num_types;
  const int t_periods = static_cast<int>(arrivals.size());
  result.reset(m_types);
  result.start_inventory = start_inventory;

  std::vector<double>& remaining = resolver.remaining_buf_;
  remaining.assign(static_cast<std::size_t>(m_types), 0.0);
  std::vector<std::int64_t>& suffix = resolver.suffix_buf_;
  if (algo.uses_realized_demand()) {
    suffix.assign(static_cast<std::size_t>(m_types), 0);
    for (int type : arrivals)
      if (type != 0) ++suffix[static_cast<std::size_t>(type - 1)];
  }

  std::int64_t on_hand = start_inventory;
  for (int t = 1; t <= t_periods; ++t) {
    const int type = arrivals[static_cast<std::size_t>(t - 1)];
    if (type != 0) {
      if (algo.uses_realized_demand()) {
        for (int j = 0; j < m_types; ++j) remaining[static_cast<std::size_t>(j)] = static_cast<double>(suffix[static_cast<std::size_t>(j)]);
      } else {
        const double periods_left = static_cast<double>(t_periods - t + 1);
        for (int j = 1; j <= m_types; ++j) remaining[static_cast<std::size_t>(j - 1)] = periods_left * spec.lambda(j);
      }
      bool accept = resolver.decide(on_hand, remaining, ctx, type, backend, stats);
      if (accept && on_hand > 0) {
        --on_hand;
        result.reward += spec.reward(type);
        ++result.accepted[type - 1];
      } else if (on_hand > 0) {
        ++result.rejected_choice[type - 1];
      } else {
        ++result.rejected_stockout[type - 1];
      }
      if (algo.uses_realized_demand()) --suffix[static_cast<std::size_t>(type - 1)];
    }
  }
  result.ending_inventory = on_hand;
  result.holding = spec.holding_cost * on_hand;
}

CycleResult run_cycle_resolving(const ProblemSpec& spec, const FulfillmentAlgo& algo,
                                std::int64_t start_inventory, std::span<const int> arrivals,
                                const LookAheadContext& ctx, LookaheadResolver& resolver,
                                LpBackend backend, LpCheckStats* stats) {
  CycleResult result(spec.num_types);
  run_cycle_resolving(spec, algo, start_inventory, arrivals, ctx, resolver, result, backend, stats);
  return result;
}

void to_json(nlohmann::json& j, const FulfillmentAlgo& a) {
  switch (a.kind) {
    case FulfillmentAlgo::Kind::GreedyOnline:
      j = nlohmann::json{{"kind", "greedy"}};
      break;
    case FulfillmentAlgo::Kind::MyopicOffline:
      j = nlohmann::json{{"kind", "myopic_offline"}};
      break;
    case FulfillmentAlgo::Kind::LookaheadOnline:
      j = nlohmann::json{{"kind", "lookahead_online"}, {"n_tilde", a.n_tilde}};
      break;
    case FulfillmentAlgo::Kind::LookaheadOffline:
      j = nlohmann::json{{"kind", "lookahead_offline"}, {"n_tilde", a.n_tilde}};
      break;
  }
}

void from_json(const nlohmann::json& j, FulfillmentAlgo& a) {
  std::string kind = j.at("kind").get<std::string>();
  a.n_tilde = j.value("n_tilde", 0);
  if (kind == "greedy") {
    a.kind = FulfillmentAlgo::Kind::GreedyOnline;
  } else if (kind == "myopic_offline") {
    a.kind = FulfillmentAlgo::Kind::MyopicOffline;
  } else if (kind == "lookahead_online") {
    a.kind = FulfillmentAlgo::Kind::LookaheadOnline;
  } else if (kind == "lookahead_offline") {
    a.kind = FulfillmentAlgo::Kind::LookaheadOffline;
  } else if (kind == "bayes_selector") {
    a.kind = FulfillmentAlgo::Kind::LookaheadOnline;
    a.n_tilde = 0;
  } else {
    throw std::invalid_argument("unknown fulfillment algorithm kind: " + kind);
  }
}

}  // namespace invsim
