#include "invsim/multires.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "invsim/lpsolve.hpp"
#include "invsim/stochastics.hpp"

namespace invsim {

double MultiSpec::resource_max_reward(int resource) const {
  double best = 0.0;
  for (int j = 1; j <= num_types; ++j) best = std::max(best, reward_value(j, resource));
  return best;
}

double MultiSpec::max_reward() const {
  double best = 0.0;
  for (int l = 0; l < num_resources; ++l) best = std::max(best, resource_max_reward(l));
  return best;
}

double MultiSpec::max_holding() const {
  Money best = 0;
  for (Money h : holding) best = std::max(best, h);
  return money_value(best);
}

double MultiSpec::lambda_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= num_types; ++j) m = std::min(m, lambda(j));
  return m;
}

double MultiSpec::min_positive_reward_gap() const {
  std::vector<Money> all;
  for (const auto& row : rewards)
    for (Money r : row) all.push_back(r);
  std::sort(all.begin(), all.end());
  Money best = std::numeric_limits<Money>::max();
  for (std::size_t i = 1; i < all.size(); ++i) {
    Money gap = all[i] - all[i - 1];
    if (gap > 0) best = std::min(best, gap);
  }
  return best == std::numeric_limits<Money>::max() ? 0.0 : money_value(best);
}

std::vector<std::string> validate_multi(const MultiSpec& mspec) {
  std::vector<std::string> out;
  if (mspec.num_resources < 1) out.push_back("d must be a positive integer");
  if (mspec.num_types < 2) out.push_back("M >= 2 required");
  if (mspec.periods_per_cycle < 1) out.push_back("T must be a positive integer");
  if (mspec.num_cycles < 1) out.push_back("N must be a positive integer");
  if (static_cast<int>(mspec.arrival_probs.size()) != mspec.num_types + 1)
    out.push_back("lambda must have exactly M+1 entries");
  else {
    double sum = 0.0;
    for (double p : mspec.arrival_probs) {
      if (p < 0.0) out.push_back("probabilities must be nonnegative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) out.push_back("probabilities must sum to 1");
  }
  if (static_cast<int>(mspec.rewards.size()) != mspec.num_types)
    out.push_back("rewards_matrix must have M rows");
  for (const auto& row : mspec.rewards)
    if (static_cast<int>(row.size()) != mspec.num_resources)
      out.push_back("rewards_matrix rows must have d entries");
  if (static_cast<int>(mspec.holding.size()) != mspec.num_resources)
    out.push_back("h_vec must have d entries");
  for (Money h : mspec.holding)
    if (h <= 0) out.push_back("holding costs must be positive");
  if (static_cast<int>(mspec.lead_times.size()) != mspec.num_resources)
    out.push_back("L_vec must have d entries");
  for (int l : mspec.lead_times)
    if (l < 0) out.push_back("lead times must be nonnegative");
  // Not all rewards identical: some pair of types must differ on some resource.
  if (!mspec.rewards.empty()) {
    bool differs = false;
    for (int l = 0; l < mspec.num_resources && !differs; ++l)
      for (int j = 2; j <= mspec.num_types && !differs; ++j)
        if (mspec.rewards[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(l)] !=
            mspec.rewards[0][static_cast<std::size_t>(l)])
          differs = true;
    if (!differs) out.push_back("rewards must not all be identical across types");
  }
  return out;
}

ProblemSpec to_single(const MultiSpec& mspec) {
  if (mspec.num_resources != 1)
    throw std::invalid_argument("to_single requires d = 1");
  ProblemSpec spec;
  spec.num_types = mspec.num_types;
  spec.periods_per_cycle = mspec.periods_per_cycle;
  spec.num_cycles = mspec.num_cycles;
  spec.lead_time = mspec.lead_times[0];
  spec.arrival_probs = mspec.arrival_probs;
  spec.rewards.reserve(static_cast<std::size_t>(mspec.num_types));
  for (const auto& row : mspec.rewards) spec.rewards.push_back(row[0]);
  spec.holding_cost = mspec.holding[0];
  return spec;
}

int greedy_assign(int type, std::span<const std::int64_t> on_hand, const MultiSpec& mspec) {
  int best = -1;
  Money best_reward = std::numeric_limits<Money>::min();
  for (int l = 0; l < mspec.num_resources; ++l) {
    if (on_hand[static_cast<std::size_t>(l)] <= 0) continue;
    Money r = mspec.reward(type, l);
    if (r > best_reward) {
      best_reward = r;
      best = l;
    }
  }
  return best;
}

std::vector<std::vector<std::int64_t>> myopic_offline_assign(std::span<const std::int64_t> demand_counts,
                                                             std::span<const std::int64_t> inventories,
                                                             const MultiSpec& mspec) {
  const int m_types = mspec.num_types;
  const int d = mspec.num_resources;
  std::vector<std::vector<std::int64_t>> x(static_cast<std::size_t>(m_types),
                                           std::vector<std::int64_t>(static_cast<std::size_t>(d), 0));
  if (d == 1) {
    // Exactly the single-resource allocation: highest reward first.
    std::int64_t left = inventories[0];
    for (int j = m_types; j >= 1; --j) {
      std::int64_t take = std::min(left, demand_counts[static_cast<std::size_t>(j - 1)]);
      x[static_cast<std::size_t>(j - 1)][0] = take;
      left -= take;
    }
    return x;
  }

  LpProblem lp;
  const int nvars = m_types * d;
  lp.objective.resize(nvars);
  lp.upper_bounds.resize(nvars);
  lp.row_coeffs = Eigen::MatrixXd::Zero(d + m_types, nvars);
  lp.row_upper.resize(d + m_types);
  auto var = [&](int j, int l) { return (j - 1) * d + l; };
  for (int j = 1; j <= m_types; ++j) {
    for (int l = 0; l < d; ++l) {
      lp.objective[var(j, l)] = mspec.reward_value(j, l);
      lp.upper_bounds[var(j, l)] = static_cast<double>(demand_counts[static_cast<std::size_t>(j - 1)]);
      lp.row_coeffs(l, var(j, l)) = 1.0;
      lp.row_coeffs(d + j - 1, var(j, l)) = 1.0;
    }
  }
  for (int l = 0; l < d; ++l) lp.row_upper[l] = static_cast<double>(inventories[static_cast<std::size_t>(l)]);
  for (int j = 1; j <= m_types; ++j)
    lp.row_upper[d + j - 1] = static_cast<double>(demand_counts[static_cast<std::size_t>(j - 1)]);

  LpSolution sol = solve_lp(lp);
  for (int j = 1; j <= m_types; ++j) {
    for (int l = 0; l < d; ++l) {
      double v = sol.x[var(j, l)];
      double rounded = std::round(v);
      if (std::abs(v - rounded) > 1e-9)
        throw LpError("myopic_offline_assign: non-integral transportation optimum", dump_lp(lp));
      x[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(l)] = static_cast<std::int64_t>(rounded);
    }
  }
  return x;
}

namespace {

LpProblem build_multi_lookahead_lp(const MultiSpec& mspec, int n_tilde,
                                   std::span<const std::int64_t> on_hand,
                                   std::span<const double> remaining_demand_now,
                                   std::span<const LookAheadContext> ctx_per_resource) {
  const int m_types = mspec.num_types;
  const int d = mspec.num_resources;
  const int stages = 1 + n_tilde;
  const int nvars = stages * m_types * d;
  const double t_periods = static_cast<double>(mspec.periods_per_cycle);

  LpProblem lp;
  lp.objective.resize(nvars);
  lp.upper_bounds.resize(nvars);
  lp.row_coeffs = Eigen::MatrixXd::Zero(d * stages + m_types * stages, nvars);
  lp.row_upper.resize(d * stages + m_types * stages);
  auto var = [&](int s, int j, int l) { return (s * m_types + (j - 1)) * d + l; };

  for (int s = 0; s < stages; ++s)
    for (int j = 1; j <= m_types; ++j)
      for (int l = 0; l < d; ++l) {
        int v = var(s, j, l);
        lp.objective[v] = mspec.reward_value(j, l) +
                          money_value(mspec.holding[static_cast<std::size_t>(l)]) *
                              static_cast<double>(n_tilde - s);
        lp.upper_bounds[v] = kLpInfinity;  // bounded by the demand rows
      }

  // Per-resource nested capacities: rows l*stages + k.
  for (int l = 0; l < d; ++l) {
    double cap = static_cast<double>(on_hand[static_cast<std::size_t>(l)]);
    for (int k = 0; k < stages; ++k) {
      if (k >= 1) cap += static_cast<double>(ctx_per_resource[static_cast<std::size_t>(l)].order(k));
      int row = l * stages + k;
      lp.row_upper[row] = cap;
      for (int s = 0; s <= k; ++s)
        for (int j = 1; j <= m_types; ++j) lp.row_coeffs(row, var(s, j, l)) = 1.0;
    }
  }
  // Demand splits across resources: rows d*stages + s*m_types + (j-1).
  for (int s = 0; s < stages; ++s)
    for (int j = 1; j <= m_types; ++j) {
      int row = d * stages + s * m_types + (j - 1);
      lp.row_upper[row] = (s == 0) ? remaining_demand_now[static_cast<std::size_t>(j - 1)]
                                   : t_periods * mspec.lambda(j);
      for (int l = 0; l < d; ++l) lp.row_coeffs(row, var(s, j, l)) = 1.0;
    }
  return lp;
}

}  // namespace

MultiDecision multi_lookahead_decide(const MultiSpec& mspec, int n_tilde,
                                     std::span<const std::int64_t> on_hand,
                                     std::span<const double> remaining_demand_now,
                                     std::span<const LookAheadContext> ctx_per_resource,
                                     int arriving_type, LpBackend backend, LpCheckStats* stats) {
  MultiDecision decision;
  std::int64_t total_stock = 0;
  for (std::int64_t i : on_hand) total_stock += i;
  if (total_stock <= 0) return decision;

  LpProblem lp = build_multi_lookahead_lp(mspec, n_tilde, on_hand, remaining_demand_now, ctx_per_resource);
  LpSolution sol = solve_lp(lp);
  if (backend == LpBackend::Certified || stats) {
    double scale = 1.0 + std::abs(sol.objective_value);
    if (stats) {
      ++stats->solves;
      stats->max_gap_ratio = std::max(stats->max_gap_ratio, sol.duality_gap / scale);
    }
    if (backend == LpBackend::Certified && sol.duality_gap > kLpGapTol * scale)
      throw LpError("multi lookahead LP certificate failed", dump_lp(lp));
  }

  const int d = mspec.num_resources;
  auto var = [&](int s, int j, int l) { return (s * mspec.num_types + (j - 1)) * d + l; };
  double accepted_mass = 0.0;
  for (int l = 0; l < d; ++l) accepted_mass += sol.x[var(0, arriving_type, l)];
  double rejected_mass = remaining_demand_now[static_cast<std::size_t>(arriving_type - 1)] - accepted_mass;
  if (accepted_mass < rejected_mass - 1e-9) return decision;

  int best = -1;
  double best_mass = -1.0;
  for (int l = 0; l < d; ++l) {
    if (on_hand[static_cast<std::size_t>(l)] <= 0) continue;
    double m = sol.x[var(0, arriving_type, l)];
    if (m > best_mass + 1e-12) {
      best_mass = m;
      best = l;
    }
  }
  if (best < 0) return decision;  // no stocked resource carries mass
  decision.accept = true;
  decision.resource = best;
  return decision;
}

namespace {

struct MultiWorkspace {
  std::vector<int> arrivals;
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> on_hand;
  std::vector<std::vector<std::int64_t>> pipelines;
  std::vector<LookAheadContext> ctx;
  std::vector<double> remaining;
};

struct MultiAccumulator {
  std::vector<Money> path_profit;
  std::vector<Money> cycle_profit_sum;
  std::vector<std::int64_t> cycle_ending_sum;  // totals across resources
  std::vector<std::int64_t> accepted_by_type;
};

void multi_load_initial(const MultiRunConfig& cfg, MultiWorkspace& ws) {
  const int d = cfg.mspec.num_resources;
  ws.on_hand.assign(static_cast<std::size_t>(d), 0);
  ws.pipelines.assign(static_cast<std::size_t>(d), {});
  for (int l = 0; l < d; ++l) {
    if (cfg.initial) {
      ws.on_hand[static_cast<std::size_t>(l)] = cfg.initial->on_hand[static_cast<std::size_t>(l)];
      ws.pipelines[static_cast<std::size_t>(l)] = cfg.initial->in_flight[static_cast<std::size_t>(l)];
    } else {
      PipelineState st = initial_state(cfg.policies[static_cast<std::size_t>(l)],
                                       cfg.mspec.lead_times[static_cast<std::size_t>(l)]);
      ws.on_hand[static_cast<std::size_t>(l)] = st.on_hand;
      ws.pipelines[static_cast<std::size_t>(l)] = st.in_flight;
    }
  }
}

void multi_simulate_range(const MultiRunConfig& cfg, const SimOptions& opts, int path_begin,
                          int path_end, MultiAccumulator& acc, CycleMatrices* capture,
                          LpCheckStats* stats) {
  const MultiSpec& mspec = cfg.mspec;
  const int d = mspec.num_resources;
  const int m_types = mspec.num_types;
  const int t_periods = mspec.periods_per_cycle;
  const int n_cycles = mspec.num_cycles;
  const int n_tilde = cfg.algo.n_tilde;

  ProblemSpec sampler_spec;
  sampler_spec.arrival_probs = mspec.arrival_probs;
  const ArrivalSampler sampler(sampler_spec);

  MultiWorkspace ws;
  ws.arrivals.resize(static_cast<std::size_t>(t_periods));
  ws.counts.resize(static_cast<std::size_t>(m_types));
  ws.ctx.assign(static_cast<std::size_t>(d), LookAheadContext{});
  ws.remaining.resize(static_cast<std::size_t>(m_types));

  for (int path = path_begin; path < path_end; ++path) {
    multi_load_initial(cfg, ws);
    Money path_total = 0;
    for (int cycle = 1; cycle <= n_cycles; ++cycle) {
      for (int t = 1; t <= t_periods; ++t)
        ws.arrivals[static_cast<std::size_t>(t - 1)] =
            sampler.draw(cfg.master_seed, static_cast<std::uint64_t>(path),
                         static_cast<std::uint64_t>(cycle - 1), static_cast<std::uint64_t>(t - 1));

      std::int64_t total_start = 0;
      for (std::int64_t i : ws.on_hand) total_start += i;

      Money reward = 0;
      std::vector<std::int64_t> accepted(static_cast<std::size_t>(m_types), 0);
      switch (cfg.algo.kind) {
        case FulfillmentAlgo::Kind::GreedyOnline: {
          for (int type : ws.arrivals) {
            if (type == 0) continue;
            int l = greedy_assign(type, ws.on_hand, mspec);
            if (l >= 0) {
              --ws.on_hand[static_cast<std::size_t>(l)];
              reward += mspec.reward(type, l);
              ++accepted[static_cast<std::size_t>(type - 1)];
            }
          }
          break;
        }
        case FulfillmentAlgo::Kind::MyopicOffline: {
          std::fill(ws.counts.begin(), ws.counts.end(), 0);
          for (int type : ws.arrivals)
            if (type != 0) ++ws.counts[static_cast<std::size_t>(type - 1)];
          auto x = myopic_offline_assign(ws.counts, ws.on_hand, mspec);
          for (int j = 1; j <= m_types; ++j)
            for (int l = 0; l < d; ++l) {
              std::int64_t units = x[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(l)];
              ws.on_hand[static_cast<std::size_t>(l)] -= units;
              reward += mspec.reward(j, l) * units;
              accepted[static_cast<std::size_t>(j - 1)] += units;
            }
          break;
        }
        case FulfillmentAlgo::Kind::LookaheadOnline:
        case FulfillmentAlgo::Kind::LookaheadOffline: {
          for (int l = 0; l < d; ++l) {
            auto& orders = ws.ctx[static_cast<std::size_t>(l)].future_orders;
            orders.assign(static_cast<std::size_t>(n_tilde), 0);
            const auto& pipe = ws.pipelines[static_cast<std::size_t>(l)];
            for (int i = 0; i < n_tilde; ++i) {
              if (i < static_cast<int>(pipe.size()))
                orders[static_cast<std::size_t>(i)] = pipe[static_cast<std::size_t>(i)];
              else if (cfg.policies[static_cast<std::size_t>(l)].kind ==
                       ReplenishmentPolicy::Kind::ConstantOrder)
                orders[static_cast<std::size_t>(i)] = cfg.policies[static_cast<std::size_t>(l)].level;
            }
          }
          std::vector<std::int64_t> suffix;
          if (cfg.algo.uses_realized_demand()) {
            suffix.assign(static_cast<std::size_t>(m_types), 0);
            for (int type : ws.arrivals)
              if (type != 0) ++suffix[static_cast<std::size_t>(type - 1)];
          }
          for (int t = 1; t <= t_periods; ++t) {
            int type = ws.arrivals[static_cast<std::size_t>(t - 1)];
            if (type == 0) continue;
            if (cfg.algo.uses_realized_demand()) {
              for (int j = 0; j < m_types; ++j)
                ws.remaining[static_cast<std::size_t>(j)] = static_cast<double>(suffix[static_cast<std::size_t>(j)]);
            } else {
              double periods_left = static_cast<double>(t_periods - t + 1);
              for (int j = 1; j <= m_types; ++j)
                ws.remaining[static_cast<std::size_t>(j - 1)] = periods_left * mspec.lambda(j);
            }
            MultiDecision dec = multi_lookahead_decide(mspec, n_tilde, ws.on_hand, ws.remaining,
                                                       ws.ctx, type, opts.lp_backend, stats);
            if (dec.accept) {
              --ws.on_hand[static_cast<std::size_t>(dec.resource)];
              reward += mspec.reward(type, dec.resource);
              ++accepted[static_cast<std::size_t>(type - 1)];
            }
            if (cfg.algo.uses_realized_demand()) --suffix[static_cast<std::size_t>(type - 1)];
          }
          break;
        }
      }

      Money holding = 0;
      std::int64_t total_ending = 0;
      for (int l = 0; l < d; ++l) {
        holding += mspec.holding[static_cast<std::size_t>(l)] * ws.on_hand[static_cast<std::size_t>(l)];
        total_ending += ws.on_hand[static_cast<std::size_t>(l)];
      }
      Money profit = reward - holding;
      path_total += profit;
      acc.cycle_profit_sum[static_cast<std::size_t>(cycle - 1)] += profit;
      acc.cycle_ending_sum[static_cast<std::size_t>(cycle - 1)] += total_ending;
      for (int j = 0; j < m_types; ++j)
        acc.accepted_by_type[static_cast<std::size_t>(j)] += accepted[static_cast<std::size_t>(j)];
      if (capture) {
        std::size_t idx = capture->at(path, cycle);
        capture->profit[idx] = profit;
        capture->start_inventory[idx] = total_start;
        capture->ending_inventory[idx] = total_ending;
      }

      if (cycle < n_cycles) {
        for (int l = 0; l < d; ++l) {
          auto& pipe = ws.pipelines[static_cast<std::size_t>(l)];
          std::int64_t arriving = pipe.empty() ? 0 : pipe.front();
          if (!pipe.empty()) pipe.erase(pipe.begin());
          std::int64_t& stock = ws.on_hand[static_cast<std::size_t>(l)];
          stock += arriving;
          std::int64_t position = stock;
          for (std::int64_t q : pipe) position += q;
          const auto& policy = cfg.policies[static_cast<std::size_t>(l)];
          std::int64_t placed;
          if (policy.kind == ReplenishmentPolicy::Kind::BaseStock) {
            placed = policy.level - position;
            if (placed < 0)
              throw std::logic_error("multi base-stock position exceeds S (resource " +
                                     std::to_string(l) + ", cycle " + std::to_string(cycle) + ")");
          } else {
            placed = policy.level;
          }
          pipe.push_back(placed);
        }
      }
    }
    acc.path_profit[static_cast<std::size_t>(path)] = path_total;
  }
}

}  // namespace

SimResult simulate_multi_detailed(const MultiRunConfig& cfg, const SimOptions& opts) {
  auto violations = validate_multi(cfg.mspec);
  if (!violations.empty())
    throw std::invalid_argument("invalid MultiSpec: " + violations.front());
  if (static_cast<int>(cfg.policies.size()) != cfg.mspec.num_resources)
    throw std::invalid_argument("one replenishment policy per resource required");
  if (cfg.num_paths < 1) throw std::invalid_argument("num_paths must be >= 1");

  if (cfg.mspec.num_resources == 1) {
    RunConfig single;
    single.spec = to_single(cfg.mspec);
    single.policy = cfg.policies[0];
    single.algo = cfg.algo;
    single.num_paths = cfg.num_paths;
    single.master_seed = cfg.master_seed;
    if (cfg.initial) single.initial = PipelineState{cfg.initial->on_hand[0], cfg.initial->in_flight[0]};
    return simulate_detailed(single, opts);
  }

  const int k_paths = cfg.num_paths;
  const int n_cycles = cfg.mspec.num_cycles;
  const int m_types = cfg.mspec.num_types;

  SimResult out;
  CycleMatrices* capture = nullptr;
  if (opts.capture_cycles) {
    out.cycles.num_paths = k_paths;
    out.cycles.num_cycles = n_cycles;
    std::size_t cells = static_cast<std::size_t>(k_paths) * n_cycles;
    out.cycles.profit.assign(cells, 0);
    out.cycles.start_inventory.assign(cells, 0);
    out.cycles.ending_inventory.assign(cells, 0);
    capture = &out.cycles;
  }

  int workers = std::clamp(opts.threads, 1, k_paths);
  std::vector<MultiAccumulator> accs(static_cast<std::size_t>(workers));
  std::vector<LpCheckStats> stats(static_cast<std::size_t>(workers));
  for (auto& acc : accs) {
    acc.path_profit.assign(static_cast<std::size_t>(k_paths), 0);
    acc.cycle_profit_sum.assign(static_cast<std::size_t>(n_cycles), 0);
    acc.cycle_ending_sum.assign(static_cast<std::size_t>(n_cycles), 0);
    acc.accepted_by_type.assign(static_cast<std::size_t>(m_types), 0);
  }

  if (workers == 1) {
    multi_simulate_range(cfg, opts, 0, k_paths, accs[0], capture, &stats[0]);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
      int begin = static_cast<int>(static_cast<std::int64_t>(k_paths) * w / workers);
      int end = static_cast<int>(static_cast<std::int64_t>(k_paths) * (w + 1) / workers);
      pool.emplace_back([&, w, begin, end] {
        try {
          multi_simulate_range(cfg, opts, begin, end, accs[static_cast<std::size_t>(w)], capture,
                               &stats[static_cast<std::size_t>(w)]);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  MultiAccumulator total = std::move(accs[0]);
  for (std::size_t w = 1; w < accs.size(); ++w) {
    for (std::size_t k = 0; k < total.path_profit.size(); ++k)
      total.path_profit[k] += accs[w].path_profit[k];
    for (std::size_t n = 0; n < total.cycle_profit_sum.size(); ++n) {
      total.cycle_profit_sum[n] += accs[w].cycle_profit_sum[n];
      total.cycle_ending_sum[n] += accs[w].cycle_ending_sum[n];
    }
    for (std::size_t j = 0; j < total.accepted_by_type.size(); ++j)
      total.accepted_by_type[j] += accs[w].accepted_by_type[j];
  }
  for (const auto& s : stats) {
    out.lp_stats.solves += s.solves;
    out.lp_stats.max_gap_ratio = std::max(out.lp_stats.max_gap_ratio, s.max_gap_ratio);
    out.lp_stats.max_backend_diff = std::max(out.lp_stats.max_backend_diff, s.max_backend_diff);
  }

  RunSummary& s = out.summary;
  double mean = 0.0;
  for (int k = 0; k < k_paths; ++k)
    mean += money_value(total.path_profit[static_cast<std::size_t>(k)]) / n_cycles;
  mean /= k_paths;
  double var = 0.0;
  for (int k = 0; k < k_paths; ++k) {
    double delta = money_value(total.path_profit[static_cast<std::size_t>(k)]) / n_cycles - mean;
    var += delta * delta;
  }
  var = (k_paths > 1) ? var / (k_paths - 1) : 0.0;
  s.avg_profit_per_cycle = mean;
  s.avg_profit_per_period = mean / cfg.mspec.periods_per_cycle;
  s.std_error = std::sqrt(var / k_paths);
  s.cycle_profit_mean.resize(static_cast<std::size_t>(n_cycles));
  s.cycle_ending_mean.resize(static_cast<std::size_t>(n_cycles));
  for (int n = 0; n < n_cycles; ++n) {
    s.cycle_profit_mean[static_cast<std::size_t>(n)] =
        money_value(total.cycle_profit_sum[static_cast<std::size_t>(n)]) / k_paths;
    s.cycle_ending_mean[static_cast<std::size_t>(n)] =
        static_cast<double>(total.cycle_ending_sum[static_cast<std::size_t>(n)]) / k_paths;
  }
  s.accepted_by_type = std::move(total.accepted_by_type);
  s.periods_per_cycle = cfg.mspec.periods_per_cycle;
  s.num_cycles = n_cycles;
  s.lead_time = *std::max_element(cfg.mspec.lead_times.begin(), cfg.mspec.lead_times.end());
  s.num_paths = k_paths;
  s.n_tilde = cfg.algo.n_tilde;
  s.policy_name = "multi";
  s.policy_param = 0;
  s.algo_name = cfg.algo.name();
  s.seed = cfg.master_seed;
  return out;
}

RunSummary simulate_multi(const MultiRunConfig& cfg, const SimOptions& opts) {
  SimOptions o = opts;
  o.capture_cycles = false;
  return simulate_multi_detailed(cfg, o).summary;
}

void to_json(nlohmann::json& j, const MultiSpec& mspec) {
  std::vector<std::vector<double>> rewards;
  for (const auto& row : mspec.rewards) {
    std::vector<double> r;
    for (Money m : row) r.push_back(money_value(m));
    rewards.push_back(std::move(r));
  }
  std::vector<double> h;
  for (Money m : mspec.holding) h.push_back(money_value(m));
  j = nlohmann::json{{"d", mspec.num_resources}, {"T", mspec.periods_per_cycle},
                     {"N", mspec.num_cycles},    {"lambda", mspec.arrival_probs},
                     {"rewards_matrix", rewards}, {"h_vec", h},
                     {"L_vec", mspec.lead_times}};
}

void from_json(const nlohmann::json& j, MultiSpec& mspec) {
  mspec.num_resources = j.at("d").get<int>();
  mspec.periods_per_cycle = j.at("T").get<int>();
  mspec.num_cycles = j.at("N").get<int>();
  mspec.arrival_probs = j.at("lambda").get<std::vector<double>>();
  mspec.num_types = static_cast<int>(mspec.arrival_probs.size()) - 1;
  mspec.rewards.clear();
  for (const auto& row : j.at("rewards_matrix")) {
    std::vector<Money> r;
    for (double v : row) r.push_back(to_money(v));
    mspec.rewards.push_back(std::move(r));
  }
  mspec.holding.clear();
  for (double v : j.at("h_vec")) mspec.holding.push_back(to_money(v));
  mspec.lead_times = j.at("L_vec").get<std::vector<int>>();
}

}  // namespace invsim
