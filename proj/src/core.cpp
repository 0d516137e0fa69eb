#include "invsim/core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace invsim {

double ProblemSpec::lambda_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= num_types; ++j) m = std::min(m, lambda(j));
  return m;
}

std::vector<std::string> validate(const ProblemSpec& spec) {
  std::vector<std::string> out;
  if (spec.num_types < 2) out.push_back("M >= 2 required");
  if (spec.periods_per_cycle < 1) out.push_back("T must be a positive integer");
  if (spec.num_cycles < 1) out.push_back("N must be a positive integer");
  if (spec.lead_time < 0) out.push_back("L must be nonnegative");
  if (static_cast<int>(spec.rewards.size()) != spec.num_types)
    out.push_back("rewards must have exactly M entries");
  if (static_cast<int>(spec.arrival_probs.size()) != spec.num_types + 1)
    out.push_back("lambda must have exactly M+1 entries");
  if (!spec.rewards.empty() && spec.rewards.front() <= 0)
    out.push_back("rewards must be strictly positive");
  for (std::size_t i = 1; i < spec.rewards.size(); ++i) {
    if (spec.rewards[i] <= spec.rewards[i - 1]) {
      out.push_back("rewards must be strictly increasing");
      break;
    }
  }
  if (static_cast<int>(spec.arrival_probs.size()) == spec.num_types + 1) {
    double sum = 0.0;
    bool negative = false;
    for (double p : spec.arrival_probs) {
      if (p < 0.0) negative = true;
      sum += p;
    }
    if (negative) out.push_back("probabilities must be nonnegative");
    if (std::abs(sum - 1.0) > 1e-12) out.push_back("probabilities must sum to 1");
  }
  if (spec.holding_cost <= 0) out.push_back("h must be positive");
  return out;
}

std::int64_t inventory_position(const PipelineState& state) {
  std::int64_t pos = state.on_hand;
  for (std::int64_t q : state.in_flight) pos += q;
  return pos;
}

std::int64_t ArrivalPath::demand_count(int type, int cycle, int t1, int t2) const {
  std::int64_t count = 0;
  for (int t = t1; t <= t2; ++t)
    if (at(cycle, t) == type) ++count;
  return count;
}

void to_json(nlohmann::json& j, const ProblemSpec& spec) {
  std::vector<double> rewards;
  rewards.reserve(spec.rewards.size());
  for (Money r : spec.rewards) rewards.push_back(money_value(r));
  j = nlohmann::json{{"M", spec.num_types},
                     {"T", spec.periods_per_cycle},
                     {"N", spec.num_cycles},
                     {"L", spec.lead_time},
                     {"rewards", rewards},
                     {"lambda", spec.arrival_probs},
                     {"h", money_value(spec.holding_cost)}};
}

void from_json(const nlohmann::json& j, ProblemSpec& spec) {
  spec.num_types = j.at("M").get<int>();
  spec.periods_per_cycle = j.at("T").get<int>();
  spec.num_cycles = j.at("N").get<int>();
  spec.lead_time = j.at("L").get<int>();
  spec.rewards.clear();
  for (double r : j.at("rewards")) spec.rewards.push_back(to_money(r));
  spec.arrival_probs = j.at("lambda").get<std::vector<double>>();
  spec.holding_cost = to_money(j.at("h").get<double>());
}

ProblemSpec spec_from_json_text(const std::string& text) {
  return nlohmann::json::parse(text).get<ProblemSpec>();
}

std::string spec_to_json_text(const ProblemSpec& spec) {
  nlohmann::json j = spec;
  return j.dump();
}

}  // namespace invsim
