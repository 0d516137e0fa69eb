#include "invsim/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <mutex>
#include <sstream>
#include <thread>

namespace invsim {

namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Per-worker mutable state; everything sized once so the cycle loop is
// allocation-free.
struct Workspace {
  std::vector<int> arrivals;
  std::vector<std::int64_t> counts;
  CycleResult result;
  std::optional<LookaheadResolver> resolver;
  LookAheadContext ctx;
  std::vector<std::int64_t> pipeline;
  std::int64_t on_hand = 0;
};

void load_initial(const RunConfig& cfg, Workspace& ws) {
  PipelineState init = cfg.initial ? *cfg.initial : initial_state(cfg.policy, cfg.spec);
  ws.on_hand = init.on_hand;
  ws.pipeline.assign(init.in_flight.begin(), init.in_flight.end());
}

void fill_context(const RunConfig& cfg, const Workspace& ws, int n_tilde, LookAheadContext& ctx) {
  ctx.future_orders.assign(static_cast<std::size_t>(n_tilde), 0);
  for (int i = 0; i < n_tilde; ++i) {
    if (i < static_cast<int>(ws.pipeline.size()))
      ctx.future_orders[static_cast<std::size_t>(i)] = ws.pipeline[static_cast<std::size_t>(i)];
    else if (cfg.policy.kind == ReplenishmentPolicy::Kind::ConstantOrder)
      ctx.future_orders[static_cast<std::size_t>(i)] = cfg.policy.level;
  }
}

void run_cycle(const RunConfig& cfg, Workspace& ws, const SimOptions& opts, LpCheckStats* stats) {
  const ProblemSpec& spec = cfg.spec;
  switch (cfg.algo.kind) {
    case FulfillmentAlgo::Kind::GreedyOnline:
      run_cycle_greedy(spec, ws.on_hand, ws.arrivals, ws.result);
      break;
    case FulfillmentAlgo::Kind::MyopicOffline: {
      ws.counts.assign(static_cast<std::size_t>(spec.num_types), 0);
      for (int type : ws.arrivals)
        if (type != 0) ++ws.counts[static_cast<std::size_t>(type - 1)];
      run_cycle_myopic_offline(spec, ws.on_hand, ws.counts, ws.result);
      break;
    }
    case FulfillmentAlgo::Kind::LookaheadOnline:
    case FulfillmentAlgo::Kind::LookaheadOffline:
      fill_context(cfg, ws, cfg.algo.n_tilde, ws.ctx);
      run_cycle_resolving(spec, cfg.algo, ws.on_hand, ws.arrivals, ws.ctx, *ws.resolver, ws.result,
                          opts.lp_backend, stats);
      break;
  }
}

[[noreturn]] void invariant_abort(const char* what, int path, int cycle) {
  std::ostringstream os;
  os << what << " (path " << path << ", cycle " << cycle << ")";
  throw std::logic_error(os.str());
}

// Arrival of the next order, pipeline shift, placement per Eq.-style policy
// update, position check.
void transition(const RunConfig& cfg, Workspace& ws, std::int64_t ending, int path, int cycle) {
  std::int64_t arriving = ws.pipeline.empty() ? 0 : ws.pipeline.front();
  if (!ws.pipeline.empty()) ws.pipeline.erase(ws.pipeline.begin());
  ws.on_hand = ending + arriving;

  std::int64_t position = ws.on_hand;
  for (std::int64_t q : ws.pipeline) position += q;

  std::int64_t placed = 0;
  if (cfg.policy.kind == ReplenishmentPolicy::Kind::BaseStock) {
    placed = cfg.policy.level - position;
    if (placed < 0) invariant_abort("base-stock position exceeds S", path, cycle);
  } else {
    placed = cfg.policy.level;
  }
  ws.pipeline.push_back(placed);

  if (cfg.policy.kind == ReplenishmentPolicy::Kind::BaseStock && position + placed != cfg.policy.level)
    invariant_abort("base-stock position != S after ordering", path, cycle);
}

struct PathAccumulator {
  std::vector<Money> path_profit;           // per path, cycles after burn-in
  std::vector<Money> cycle_profit_sum;      // per cycle
  std::vector<std::int64_t> cycle_ending_sum;
  std::vector<std::int64_t> accepted_by_type;
};

void simulate_range(const RunConfig& cfg, const SimOptions& opts, int path_begin, int path_end,
                    PathAccumulator& acc, CycleMatrices* capture, LpCheckStats* stats) {
  const ProblemSpec& spec = cfg.spec;
  const int t_periods = spec.periods_per_cycle;
  const int n_cycles = spec.num_cycles;
  const ArrivalSampler sampler(spec);

  Workspace ws;
  ws.arrivals.resize(static_cast<std::size_t>(t_periods));
  ws.result = CycleResult(spec.num_types);
  if (cfg.algo.is_resolving()) ws.resolver.emplace(spec, cfg.algo.n_tilde);

  for (int path = path_begin; path < path_end; ++path) {
    load_initial(cfg, ws);
    Money path_total = 0;
    for (int cycle = 1; cycle <= n_cycles; ++cycle) {
      for (int t = 1; t <= t_periods; ++t)
        ws.arrivals[static_cast<std::size_t>(t - 1)] =
            sampler.draw(cfg.master_seed, static_cast<std::uint64_t>(path),
                         static_cast<std::uint64_t>(cycle - 1), static_cast<std::uint64_t>(t - 1));

      run_cycle(cfg, ws, opts, stats);
      const Money profit = ws.result.profit();

      if (capture) {
        std::size_t idx = capture->at(path, cycle);
        capture->profit[idx] = profit;
        capture->start_inventory[idx] = ws.result.start_inventory;
        capture->ending_inventory[idx] = ws.result.ending_inventory;
      }
      if (cycle > cfg.burn_in_cycles) {
        path_total += profit;
        acc.cycle_profit_sum[static_cast<std::size_t>(cycle - 1)] += profit;
        acc.cycle_ending_sum[static_cast<std::size_t>(cycle - 1)] += ws.result.ending_inventory;
        for (int j = 0; j < spec.num_types; ++j)
          acc.accepted_by_type[static_cast<std::size_t>(j)] += ws.result.accepted[static_cast<std::size_t>(j)];
      }
      if (cycle < n_cycles) transition(cfg, ws, ws.result.ending_inventory, path, cycle);
    }
    acc.path_profit[static_cast<std::size_t>(path)] = path_total;
  }
}

}  // namespace

std::uint64_t config_hash(const RunConfig& cfg) {
  nlohmann::json j;
  j["spec"] = cfg.spec;
  j["policy"] = cfg.policy;
  j["algo"] = cfg.algo;
  j["K"] = cfg.num_paths;
  j["seed"] = cfg.master_seed;
  j["burn_in"] = cfg.burn_in_cycles;
  if (cfg.initial) {
    j["initial"] = nlohmann::json{{"on_hand", cfg.initial->on_hand}, {"in_flight", cfg.initial->in_flight}};
  }
  return fnv1a(j.dump());
}

SimResult simulate_detailed(const RunConfig& cfg, const SimOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  require_valid(cfg.spec);
  if (cfg.num_paths < 1) throw std::invalid_argument("num_paths must be >= 1");
  if (cfg.burn_in_cycles >= cfg.spec.num_cycles)
    throw std::invalid_argument("burn_in_cycles must be below N");

  const int k_paths = cfg.num_paths;
  const int n_cycles = cfg.spec.num_cycles;
  const int m_types = cfg.spec.num_types;

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
  std::vector<PathAccumulator> accs(static_cast<std::size_t>(workers));
  std::vector<LpCheckStats> stats(static_cast<std::size_t>(workers));
  for (auto& acc : accs) {
    acc.path_profit.assign(static_cast<std::size_t>(k_paths), 0);
    acc.cycle_profit_sum.assign(static_cast<std::size_t>(n_cycles), 0);
    acc.cycle_ending_sum.assign(static_cast<std::size_t>(n_cycles), 0);
    acc.accepted_by_type.assign(static_cast<std::size_t>(m_types), 0);
  }

  if (workers == 1) {
    simulate_range(cfg, opts, 0, k_paths, accs[0], capture, &stats[0]);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
      int begin = static_cast<int>(static_cast<std::int64_t>(k_paths) * w / workers);
      int end = static_cast<int>(static_cast<std::int64_t>(k_paths) * (w + 1) / workers);
      pool.emplace_back([&, w, begin, end] {
        try {
          simulate_range(cfg, opts, begin, end, accs[static_cast<std::size_t>(w)], capture,
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

  // Integer-exact merge, then floating summaries in fixed path order.
  PathAccumulator total = std::move(accs[0]);
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

  const int counted = n_cycles - cfg.burn_in_cycles;
  RunSummary& s = out.summary;
  double mean = 0.0;
  for (int k = 0; k < k_paths; ++k)
    mean += money_value(total.path_profit[static_cast<std::size_t>(k)]) / counted;
  mean /= k_paths;
  double var = 0.0;
  for (int k = 0; k < k_paths; ++k) {
    double d = money_value(total.path_profit[static_cast<std::size_t>(k)]) / counted - mean;
    var += d * d;
  }
  var = (k_paths > 1) ? var / (k_paths - 1) : 0.0;

  s.avg_profit_per_cycle = mean;
  s.avg_profit_per_period = mean / cfg.spec.periods_per_cycle;
  s.std_error = std::sqrt(var / k_paths);
  s.cycle_profit_mean.resize(static_cast<std::size_t>(counted));
  s.cycle_ending_mean.resize(static_cast<std::size_t>(counted));
  for (int n = 0; n < counted; ++n) {
    std::size_t src = static_cast<std::size_t>(cfg.burn_in_cycles + n);
    s.cycle_profit_mean[static_cast<std::size_t>(n)] = money_value(total.cycle_profit_sum[src]) / k_paths;
    s.cycle_ending_mean[static_cast<std::size_t>(n)] =
        static_cast<double>(total.cycle_ending_sum[src]) / k_paths;
  }
  s.accepted_by_type = std::move(total.accepted_by_type);
  s.config_hash = config_hash(cfg);
  s.periods_per_cycle = cfg.spec.periods_per_cycle;
  s.num_cycles = n_cycles;
  s.lead_time = cfg.spec.lead_time;
  s.num_paths = k_paths;
  s.n_tilde = cfg.algo.n_tilde;
  s.policy_name = cfg.policy.is_base_stock() ? "base_stock" : "constant_order";
  s.policy_param = cfg.policy.level;
  s.algo_name = cfg.algo.name();
  s.seed = cfg.master_seed;
  s.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

RunSummary simulate(const RunConfig& cfg, const SimOptions& opts) {
  SimOptions o = opts;
  o.capture_cycles = false;
  return simulate_detailed(cfg, o).summary;
}

std::pair<std::int64_t, RunSummary> optimize_parameter(const RunConfig& cfg_template,
                                                       std::int64_t lo, std::int64_t hi,
                                                       const SimOptions& opts) {
  if (lo > hi) throw std::invalid_argument("optimize_parameter: empty range");
  std::optional<RunSummary> best;
  std::int64_t best_param = lo;
  for (std::int64_t p = lo; p <= hi; ++p) {
    RunConfig cfg = cfg_template;
    cfg.policy.level = p;
    RunSummary s = simulate(cfg, opts);
    if (!best || s.avg_profit_per_cycle > best->avg_profit_per_cycle) {
      best = std::move(s);
      best_param = p;
    }
  }
  return {best_param, *best};
}

RegretReport regret_series(const RunConfig& cfg_off, const RunConfig& cfg_on,
                           const SimOptions& opts, std::span<const int> checkpoint_cycles) {
  nlohmann::json spec_a = cfg_off.spec, spec_b = cfg_on.spec;
  if (spec_a != spec_b || !(cfg_off.policy == cfg_on.policy) ||
      cfg_off.master_seed != cfg_on.master_seed || cfg_off.num_paths != cfg_on.num_paths ||
      cfg_off.initial != cfg_on.initial)
    throw std::invalid_argument("regret_series: configs must share spec, policy, seed, K and initial state");

  SimOptions capture_opts = opts;
  capture_opts.capture_cycles = true;
  SimResult off = simulate_detailed(cfg_off, capture_opts);
  SimResult on = simulate_detailed(cfg_on, capture_opts);

  const int k_paths = cfg_off.num_paths;
  const int n_cycles = cfg_off.spec.num_cycles;
  RegretReport report;
  report.per_cycle_gap.resize(static_cast<std::size_t>(n_cycles));
  for (int n = 1; n <= n_cycles; ++n) {
    double sum = 0.0;
    for (int k = 0; k < k_paths; ++k)
      sum += money_value(off.cycles.profit[off.cycles.at(k, n)] - on.cycles.profit[on.cycles.at(k, n)]);
    report.per_cycle_gap[static_cast<std::size_t>(n - 1)] = sum / k_paths;
    report.cumulative_gap += sum / k_paths;
  }

  static constexpr int kDefaultCheckpoints[] = {10, 50, 100};
  std::span<const int> cps = checkpoint_cycles.empty() ? std::span<const int>(kDefaultCheckpoints)
                                                       : checkpoint_cycles;
  for (int cp : cps) {
    if (cp < 1 || cp > n_cycles) continue;
    double mean = report.per_cycle_gap[static_cast<std::size_t>(cp - 1)];
    double var = 0.0;
    for (int k = 0; k < k_paths; ++k) {
      double d = money_value(off.cycles.profit[off.cycles.at(k, cp)] - on.cycles.profit[on.cycles.at(k, cp)]) - mean;
      var += d * d;
    }
    var = (k_paths > 1) ? var / (k_paths - 1) : 0.0;
    report.checkpoints.push_back({cp, mean, std::sqrt(var / k_paths)});
  }
  return report;
}

double exact_expectation(const ProblemSpec& spec, const std::optional<ReplenishmentPolicy>& policy,
                         const FulfillmentAlgo& algo, const PipelineState& initial,
                         std::span<const std::int64_t> extra_orders) {
  require_valid(spec);
  const int slots = spec.num_cycles * spec.periods_per_cycle;
  const double states = std::pow(static_cast<double>(spec.num_types + 1), slots);
  if (!(states <= 1e6))
    throw std::domain_error("exact_expectation: (M+1)^(N*T) exceeds 1e6");

  const int t_periods = spec.periods_per_cycle;
  const int n_cycles = spec.num_cycles;

  std::vector<int> digits(static_cast<std::size_t>(slots), -1);
  Workspace ws;
  ws.arrivals.resize(static_cast<std::size_t>(t_periods));
  ws.result = CycleResult(spec.num_types);
  if (algo.is_resolving()) ws.resolver.emplace(spec, algo.n_tilde);

  // The exogenous schedule is simply the tail of the arrival pipeline; with a
  // policy, every later order follows the standard dynamics.
  std::vector<std::int64_t> base_pipeline(initial.in_flight.begin(), initial.in_flight.end());
  base_pipeline.insert(base_pipeline.end(), extra_orders.begin(), extra_orders.end());
  RunConfig dyn;
  dyn.spec = spec;
  dyn.algo = algo;
  dyn.policy = policy.value_or(ReplenishmentPolicy::constant_order(0));

  double expected = 0.0;
  // Depth-first over arrival grids, pruning zero-probability digits.
  std::vector<double> weight_stack(static_cast<std::size_t>(slots) + 1, 1.0);
  int depth = 0;
  while (depth >= 0) {
    if (depth == slots) {
      // run dynamics for this grid
      ws.on_hand = initial.on_hand;
      ws.pipeline = base_pipeline;
      double profit = 0.0;
      for (int cycle = 1; cycle <= n_cycles; ++cycle) {
        for (int t = 1; t <= t_periods; ++t)
          ws.arrivals[static_cast<std::size_t>(t - 1)] =
              digits[static_cast<std::size_t>((cycle - 1) * t_periods + (t - 1))];

        run_cycle(dyn, ws, SimOptions{}, nullptr);
        profit += money_value(ws.result.profit());

        if (cycle < n_cycles) {
          if (policy) {
            transition(dyn, ws, ws.result.ending_inventory, 0, cycle);
          } else {
            std::int64_t arriving = ws.pipeline.empty() ? 0 : ws.pipeline.front();
            if (!ws.pipeline.empty()) ws.pipeline.erase(ws.pipeline.begin());
            ws.on_hand = ws.result.ending_inventory + arriving;
          }
        }
      }
      expected += weight_stack[static_cast<std::size_t>(slots)] * profit;
      --depth;
      continue;
    }
    int& d = digits[static_cast<std::size_t>(depth)];
    ++d;
    bool advanced = false;
    while (d <= spec.num_types) {
      double p = spec.arrival_probs[static_cast<std::size_t>(d)];
      if (p > 0.0) {
        weight_stack[static_cast<std::size_t>(depth) + 1] = weight_stack[static_cast<std::size_t>(depth)] * p;
        advanced = true;
        break;
      }
      ++d;
    }
    if (!advanced) {
      d = -1;
      --depth;
    } else {
      ++depth;
    }
  }
  return expected;
}

double estimate_interior_probability(const ProblemSpec& spec, std::int64_t s_level, double slack,
                                     int num_paths, std::uint64_t seed, int burn_in,
                                     int sample_cycles, int threads) {
  ProblemSpec sampled = spec;
  sampled.num_cycles = burn_in + sample_cycles;
  RunConfig cfg{sampled, ReplenishmentPolicy::base_stock(s_level), FulfillmentAlgo::greedy(),
                num_paths, seed, std::nullopt, 0};
  SimOptions opts;
  opts.threads = threads;
  opts.capture_cycles = true;
  SimResult res = simulate_detailed(cfg, opts);

  const double t_periods = static_cast<double>(spec.periods_per_cycle);
  const double low = t_periods * spec.lambda(spec.num_types);
  const double high = t_periods * spec.mu() - slack;
  std::int64_t hits = 0, total = 0;
  for (int k = 0; k < num_paths; ++k) {
    for (int n = burn_in + 1; n <= sampled.num_cycles; ++n) {
      double start = static_cast<double>(res.cycles.start_inventory[res.cycles.at(k, n)]);
      ++total;
      if (start > low && start <= high) ++hits;
    }
  }
  return total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

std::string RunSummary::csv_header() {
  return "config_hash,T,N,L,policy,param,algo,n_tilde,K,seed,avg_profit_cycle,avg_profit_period,se,runtime_ms";
}

namespace {
std::string fmt_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}
}  // namespace

std::string RunSummary::csv_row() const {
  std::ostringstream os;
  os << csv_row_stable() << ',' << fmt_fixed(runtime_ms);
  return os.str();
}

std::string RunSummary::csv_header_stable() {
  return "config_hash,T,N,L,policy,param,algo,n_tilde,K,seed,avg_profit_cycle,avg_profit_period,se";
}

std::string RunSummary::csv_row_stable() const {
  std::ostringstream os;
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx", static_cast<unsigned long long>(config_hash));
  os << hash_hex << ',' << periods_per_cycle << ',' << num_cycles << ',' << lead_time << ','
     << policy_name << ',' << policy_param << ',' << algo_name << ',' << n_tilde << ',' << num_paths
     << ',' << seed << ',' << fmt_fixed(avg_profit_per_cycle) << ',' << fmt_fixed(avg_profit_per_period)
     << ',' << fmt_fixed(std_error);
  return os.str();
}

void to_json(nlohmann::json& j, const RunSummary& s) {
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx", static_cast<unsigned long long>(s.config_hash));
  j = nlohmann::json{{"config_hash", hash_hex},
                     {"T", s.periods_per_cycle},
                     {"N", s.num_cycles},
                     {"L", s.lead_time},
                     {"policy", s.policy_name},
                     {"param", s.policy_param},
                     {"algo", s.algo_name},
                     {"n_tilde", s.n_tilde},
                     {"K", s.num_paths},
                     {"seed", s.seed},
                     {"avg_profit_per_cycle", s.avg_profit_per_cycle},
                     {"avg_profit_per_period", s.avg_profit_per_period},
                     {"std_error", s.std_error},
                     {"cycle_profit_mean", s.cycle_profit_mean},
                     {"cycle_ending_mean", s.cycle_ending_mean},
                     {"accepted_by_type", s.accepted_by_type}};
}

void to_json(nlohmann::json& j, const RegretReport& r) {
  nlohmann::json cps = nlohmann::json::array();
  for (const auto& cp : r.checkpoints)
    cps.push_back({{"cycle", cp.cycle}, {"gap", cp.gap}, {"se", cp.se}});
  j = nlohmann::json{{"per_cycle_gap", r.per_cycle_gap},
                     {"cumulative_gap", r.cumulative_gap},
                     {"checkpoints", cps}};
}

}  // namespace invsim
