// Experiment driver for the lost-sales fulfillment simulator: single runs,
// parameter search, regret comparisons, bound reports, and the preset studies.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "invsim/bounds.hpp"
#include "invsim/engine.hpp"
#include "invsim/experiments.hpp"
#include "invsim/multires.hpp"

namespace fs = std::filesystem;
using namespace invsim;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = experiments::kDefaultSeed;
  int paths = 0;  // 0 = preset default
  double scale = 0.2;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  bool certified = false;
};

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

int scaled_paths(const CommonFlags& flags) {
  if (flags.paths > 0) return flags.paths;
  return std::max(1, static_cast<int>(std::llround(experiments::kFullPaths * flags.scale)));
}

RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig cfg;
  try {
    cfg.spec = j.at("spec").get<ProblemSpec>();
    cfg.policy = j.at("policy").get<ReplenishmentPolicy>();
    cfg.algo = j.at("algo").get<FulfillmentAlgo>();
    cfg.num_paths = j.value("K", 1000);
    cfg.master_seed = j.value("seed", experiments::kDefaultSeed);
    cfg.burn_in_cycles = j.value("burn_in", 0);
    if (j.contains("initial")) {
      PipelineState init;
      init.on_hand = j.at("initial").at("on_hand").get<std::int64_t>();
      init.in_flight = j.at("initial").at("in_flight").get<std::vector<std::int64_t>>();
      cfg.initial = init;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config error: ") + e.what());
  }
  auto violations = validate(cfg.spec);
  if (!violations.empty()) throw ConfigError("invalid spec: " + violations.front());
  return cfg;
}

SimOptions sim_options(const CommonFlags& flags) {
  SimOptions opts;
  opts.threads = std::max(1, flags.threads);
  opts.lp_backend = flags.certified ? LpBackend::Certified : LpBackend::Fast;
  return opts;
}

int cmd_simulate(const CommonFlags& flags) {
  RunConfig cfg = parse_run_config(read_json_file(flags.config_path));
  if (flags.paths > 0) cfg.num_paths = flags.paths;
  RunSummary summary = simulate(cfg, sim_options(flags));
  nlohmann::json out = summary;
  std::cout << out.dump(2) << std::endl;
  if (!flags.out_dir.empty()) {
    write_file(fs::path(flags.out_dir) / "summary.json", out.dump(2) + "\n");
    write_file(fs::path(flags.out_dir) / "runs.csv",
               RunSummary::csv_header_stable() + "\n" + summary.csv_row_stable() + "\n");
  }
  return 0;
}

int cmd_optimize(const CommonFlags& flags) {
  nlohmann::json j = read_json_file(flags.config_path);
  RunConfig cfg = parse_run_config(j);
  std::int64_t lo, hi;
  try {
    lo = j.at("search").at("lo").get<std::int64_t>();
    hi = j.at("search").at("hi").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("optimize config needs search.lo/search.hi: ") + e.what());
  }
  auto [best, summary] = optimize_parameter(cfg, lo, hi, sim_options(flags));
  nlohmann::json out{{"best_param", best}, {"summary", summary}};
  std::cout << out.dump(2) << std::endl;
  if (!flags.out_dir.empty())
    write_file(fs::path(flags.out_dir) / "optimize.json", out.dump(2) + "\n");
  return 0;
}

int cmd_regret(const CommonFlags& flags) {
  nlohmann::json j = read_json_file(flags.config_path);
  RunConfig base = parse_run_config(j);
  RunConfig cfg_off = base, cfg_on = base;
  try {
    cfg_off.algo = j.at("algo_off").get<FulfillmentAlgo>();
    cfg_on.algo = j.at("algo_on").get<FulfillmentAlgo>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("regret config needs algo_off/algo_on: ") + e.what());
  }
  RegretReport report = regret_series(cfg_off, cfg_on, sim_options(flags));
  nlohmann::json out = report;
  std::cout << out.dump(2) << std::endl;
  if (!flags.out_dir.empty()) {
    std::ostringstream csv;
    csv << "cycle,gap\n";
    for (std::size_t n = 0; n < report.per_cycle_gap.size(); ++n)
      csv << (n + 1) << ',' << fmt6(report.per_cycle_gap[n]) << '\n';
    write_file(fs::path(flags.out_dir) / "regret.csv", csv.str());
    write_file(fs::path(flags.out_dir) / "regret.json", out.dump(2) + "\n");
  }
  return 0;
}

int cmd_bounds(const CommonFlags& flags, const std::string& model_path, const std::string& gap_mode,
               const std::vector<int>& t_sweep) {
  nlohmann::json j = read_json_file(flags.config_path);
  ProblemSpec spec = j.get<ProblemSpec>();
  auto violations = validate(spec);
  if (!violations.empty()) throw ConfigError("invalid spec: " + violations.front());

  RegretModel model = RegretModel::bayes_selector_defaults(spec);
  if (!model_path.empty()) {
    nlohmann::json mj = read_json_file(model_path);
    model.alpha = mj.value("alpha", model.alpha);
    model.C1 = mj.value("C1", model.C1);
    model.C2 = mj.value("C2", model.C2);
    model.C3 = mj.value("C3", model.C3);
    model.K_stability = mj.value("K_stability", model.K_stability);
  }

  std::optional<GapContext> ctx;
  if (gap_mode == "auto")
    ctx = experiments::measure_gap_context(spec, std::min(scaled_paths(flags), 2000), flags.seed,
                                           std::max(1, flags.threads));

  BoundReport report = regret_envelopes(spec, model, ctx);
  std::cout << report.to_json().dump(2) << std::endl;
  if (!flags.out_dir.empty()) {
    write_file(fs::path(flags.out_dir) / "bounds.json", report.to_json().dump(2) + "\n");
    std::ostringstream csv;
    csv << "T,bound_name,value\n" << report.to_csv(static_cast<double>(spec.periods_per_cycle));
    write_file(fs::path(flags.out_dir) / "bounds.csv", csv.str());
  }

  if (!t_sweep.empty()) {
    std::ostringstream csv;
    csv << "T,bound_name,value\n";
    for (int t : t_sweep) {
      ProblemSpec s = spec;
      s.periods_per_cycle = t;
      BoundReport r = regret_envelopes(s, model, std::nullopt);
      const double h = s.holding_value();
      BoundReport row;
      row.set("a1_upper_rM", r.get("a1_upper_rM"));
      row.set("a1_lower_r1", r.get("a1_lower_r1"));
      row.set("a2_r1", r.get("a2_r1"));
      row.set("a2_rM", r.get("a2_rM"));
      row.set("replenishment_gap_lower", r.get("replenishment_gap_lower"));
      row.set("replenishment_gap_upper", r.get("replenishment_gap_upper"));
      row.set("h", h);
      csv << row.to_csv(static_cast<double>(t));
    }
    std::string text = csv.str();
    std::cout << text;
    if (!flags.out_dir.empty()) write_file(fs::path(flags.out_dir) / "bounds_sweep.csv", text);
  }
  return 0;
}

int cmd_example1(const CommonFlags& flags) {
  (void)flags;
  const double off = experiments::two_cycle_example_value(FulfillmentAlgo::myopic_offline());
  const double bs = experiments::two_cycle_example_value(FulfillmentAlgo::bayes_selector());
  std::printf("offline=%.4f (reference 16.4669, delta %+0.4f)\n", off, off - 16.4669);
  std::printf("bs=%.4f (reference 16.6289, delta %+0.4f)\n", bs, bs - 16.6289);
  std::printf("bs-offline=%+0.4f\n", bs - off);
  return 0;
}

struct ComboRow {
  int periods;
  std::string combo;
  std::string policy;
  std::int64_t param;
  RunSummary summary;
};

ComboRow run_combo(const ProblemSpec& spec, ReplenishmentPolicy::Kind kind,
                   const FulfillmentAlgo& algo, int k_paths, std::uint64_t seed, int threads) {
  auto [param, summary] = experiments::optimize_policy_fast(spec, kind, algo, k_paths, seed, threads);
  ComboRow row;
  row.periods = spec.periods_per_cycle;
  row.policy = (kind == ReplenishmentPolicy::Kind::BaseStock) ? "base_stock" : "constant_order";
  row.combo = row.policy + "+" + algo.name();
  row.param = param;
  row.summary = summary;
  return row;
}

int cmd_fig1(const CommonFlags& flags) {
  const int k_paths = scaled_paths(flags);
  const int cycles = std::max(1, static_cast<int>(std::llround(1000 * flags.scale)));
  std::ostringstream csv;
  csv << "config_hash,T,combination,policy,param,algo,profit_per_cycle,profit_per_period,se\n";
  for (int t : experiments::crossover_T_grid()) {
    ProblemSpec spec = experiments::reward_spread_spec(t, cycles);
    for (auto kind : {ReplenishmentPolicy::Kind::BaseStock, ReplenishmentPolicy::Kind::ConstantOrder}) {
      for (auto algo : {FulfillmentAlgo::bayes_selector(), FulfillmentAlgo::greedy()}) {
        ComboRow row = run_combo(spec, kind, algo, k_paths, flags.seed, flags.threads);
        char hash_hex[32];
        std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                      static_cast<unsigned long long>(row.summary.config_hash));
        csv << hash_hex << ',' << t << ',' << row.combo << ',' << row.policy << ',' << row.param
            << ',' << algo.name() << ',' << fmt6(row.summary.avg_profit_per_cycle) << ','
            << fmt6(row.summary.avg_profit_per_period) << ',' << fmt6(row.summary.std_error) << '\n';
        std::cout << "T=" << t << " " << row.combo << " param=" << row.param
                  << " profit/cycle=" << fmt6(row.summary.avg_profit_per_cycle) << "\n";
      }
    }
  }
  if (!flags.out_dir.empty()) write_file(fs::path(flags.out_dir) / "fig1.csv", csv.str());
  return 0;
}

// Shared by fig3/fig4/table1: base-stock level fixed by a myopic-offline grid
// search, then the four algorithms evaluated at that common level.
struct LookaheadStudyRow {
  std::int64_t s_level;
  RunSummary myopic, bs, lookahead_off, lookahead_on;
};

LookaheadStudyRow run_lookahead_study(const ProblemSpec& spec, int n_tilde, int k_paths,
                                      std::uint64_t seed, int threads, LpBackend backend) {
  LookaheadStudyRow row;
  auto [s_level, base] = experiments::optimize_policy_fast(spec, ReplenishmentPolicy::Kind::BaseStock,
                                                           FulfillmentAlgo::myopic_offline(), k_paths,
                                                           seed, threads);
  row.s_level = s_level;
  RunConfig cfg;
  cfg.spec = spec;
  cfg.policy = ReplenishmentPolicy::base_stock(s_level);
  cfg.num_paths = k_paths;
  cfg.master_seed = seed;
  SimOptions opts;
  opts.threads = threads;
  opts.lp_backend = backend;
  cfg.algo = FulfillmentAlgo::myopic_offline();
  row.myopic = simulate(cfg, opts);
  cfg.algo = FulfillmentAlgo::bayes_selector();
  row.bs = simulate(cfg, opts);
  cfg.algo = FulfillmentAlgo::lookahead_offline(n_tilde);
  row.lookahead_off = simulate(cfg, opts);
  cfg.algo = FulfillmentAlgo::lookahead_online(n_tilde);
  row.lookahead_on = simulate(cfg, opts);
  return row;
}

int cmd_fig3(const CommonFlags& flags, int lead_time) {
  const int k_paths = scaled_paths(flags);
  ProblemSpec spec = experiments::lookahead_spec(50, 50, lead_time, 2.0, {1, 9, 10}, {0.2, 0.3, 0.3});
  std::ostringstream csv;
  csv << "config_hash,L,n_tilde,algo,profit_per_period,se,uplift_pct\n";
  auto emit = [&](const RunSummary& s, int n_tilde, double baseline) {
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx", static_cast<unsigned long long>(s.config_hash));
    double uplift = baseline != 0.0 ? (s.avg_profit_per_period - baseline) / baseline * 100.0 : 0.0;
    csv << hash_hex << ',' << lead_time << ',' << n_tilde << ',' << s.algo_name << ','
        << fmt6(s.avg_profit_per_period) << ',' << fmt6(s.std_error / spec.periods_per_cycle) << ','
        << fmt6(uplift) << '\n';
  };
  std::optional<double> base_off, base_on;
  for (int n_tilde = 0; n_tilde <= 5; ++n_tilde) {
    LookaheadStudyRow row = run_lookahead_study(spec, n_tilde, k_paths, flags.seed, flags.threads,
                                                flags.certified ? LpBackend::Certified : LpBackend::Fast);
    if (!base_off) {
      base_off = row.myopic.avg_profit_per_period;
      base_on = row.bs.avg_profit_per_period;
      emit(row.myopic, 0, *base_off);
      emit(row.bs, 0, *base_on);
    }
    emit(row.lookahead_off, n_tilde, *base_off);
    emit(row.lookahead_on, n_tilde, *base_on);
    std::cout << "L=" << lead_time << " n_tilde=" << n_tilde
              << " lookahead_on/period=" << fmt6(row.lookahead_on.avg_profit_per_period) << "\n";
  }
  if (!flags.out_dir.empty())
    write_file(fs::path(flags.out_dir) / ("fig3_L" + std::to_string(lead_time) + ".csv"), csv.str());
  return 0;
}

int cmd_fig4(const CommonFlags& flags) {
  const int k_paths = scaled_paths(flags);
  std::ostringstream csv;
  csv << "config_hash,T,algo,profit_per_period,se\n";
  for (int t : experiments::cycle_length_grid()) {
    ProblemSpec spec = experiments::lookahead_spec(t, 50, 10, 3.0, {1, 9, 10}, {0.2, 0.3, 0.3});
    LookaheadStudyRow row = run_lookahead_study(spec, 5, k_paths, flags.seed, flags.threads,
                                                flags.certified ? LpBackend::Certified : LpBackend::Fast);
    for (const RunSummary* s : {&row.myopic, &row.lookahead_off, &row.bs, &row.lookahead_on}) {
      char hash_hex[32];
      std::snprintf(hash_hex, sizeof(hash_hex), "%016llx", static_cast<unsigned long long>(s->config_hash));
      csv << hash_hex << ',' << t << ',' << s->algo_name << ',' << fmt6(s->avg_profit_per_period)
          << ',' << fmt6(s->std_error / t) << '\n';
    }
    std::cout << "T=" << t << " done\n";
  }
  if (!flags.out_dir.empty()) write_file(fs::path(flags.out_dir) / "fig4.csv", csv.str());
  return 0;
}

int cmd_table1(const CommonFlags& flags) {
  const int k_paths = scaled_paths(flags);
  std::ostringstream csv;
  csv << "row,rewards,lambda,h,S,offline_myopic,offline_lookahead,offline_uplift_pct,"
         "online_bs,online_lookahead,online_uplift_pct\n";
  int index = 0;
  for (const auto& row_def : experiments::table1_grid()) {
    ++index;
    ProblemSpec spec = experiments::lookahead_spec(50, 50, 10, row_def.h, row_def.rewards, row_def.lambda123);
    LookaheadStudyRow row = run_lookahead_study(spec, 5, k_paths, flags.seed, flags.threads,
                                                flags.certified ? LpBackend::Certified : LpBackend::Fast);
    double off_up = (row.lookahead_off.avg_profit_per_period - row.myopic.avg_profit_per_period) /
                    row.myopic.avg_profit_per_period * 100.0;
    double on_up = (row.lookahead_on.avg_profit_per_period - row.bs.avg_profit_per_period) /
                   row.bs.avg_profit_per_period * 100.0;
    auto join = [](const std::vector<double>& v) {
      std::string s = "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", v[i]);
        s += buf;
        if (i + 1 < v.size()) s += " ";
      }
      return s + "]";
    };
    csv << index << ',' << join(row_def.rewards) << ',' << join(row_def.lambda123) << ','
        << row_def.h << ',' << row.s_level << ',' << fmt6(row.myopic.avg_profit_per_period) << ','
        << fmt6(row.lookahead_off.avg_profit_per_period) << ',' << fmt6(off_up) << ','
        << fmt6(row.bs.avg_profit_per_period) << ',' << fmt6(row.lookahead_on.avg_profit_per_period)
        << ',' << fmt6(on_up) << '\n';
    std::cout << "row " << index << ": offline uplift " << fmt6(off_up) << "% online uplift "
              << fmt6(on_up) << "%\n";
  }
  if (!flags.out_dir.empty()) write_file(fs::path(flags.out_dir) / "table1.csv", csv.str());
  return 0;
}

int cmd_multi(const CommonFlags& flags) {
  nlohmann::json j = read_json_file(flags.config_path);
  MultiRunConfig cfg;
  try {
    cfg.mspec = j.at("mspec").get<MultiSpec>();
    cfg.policies = j.at("policies").get<std::vector<ReplenishmentPolicy>>();
    cfg.algo = j.at("algo").get<FulfillmentAlgo>();
    cfg.num_paths = j.value("K", 1000);
    cfg.master_seed = j.value("seed", experiments::kDefaultSeed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("multi config error: ") + e.what());
  }
  if (flags.paths > 0) cfg.num_paths = flags.paths;
  auto violations = validate_multi(cfg.mspec);
  if (!violations.empty()) throw ConfigError("invalid mspec: " + violations.front());
  RunSummary summary = simulate_multi(cfg, sim_options(flags));
  nlohmann::json out = summary;
  std::cout << out.dump(2) << std::endl;
  if (!flags.out_dir.empty())
    write_file(fs::path(flags.out_dir) / "multi_summary.json", out.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lost-sales inventory simulator with online fulfillment algorithms"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string model_path, gap_mode = "none";
  std::vector<int> t_sweep;
  int fig3_lead = 10;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config", flags.config_path, "JSON config path");
    if (needs_config) opt->required();
    cmd->add_option("--out", flags.out_dir, "output directory for CSV/JSON artifacts");
    cmd->add_option("--seed", flags.seed, "master seed");
    cmd->add_option("--paths", flags.paths, "number of sample paths K (overrides preset)");
    cmd->add_option("--scale", flags.scale, "preset scale factor in (0,1]")->check(CLI::Range(1e-3, 1.0));
    cmd->add_option("--threads", flags.threads, "worker threads");
    cmd->add_flag("--certified", flags.certified, "route every LP through the certified simplex");
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "run one Monte Carlo configuration");
  add_common(simulate_cmd, true);
  auto* optimize_cmd = app.add_subcommand("optimize", "grid-search a policy parameter");
  add_common(optimize_cmd, true);
  auto* regret_cmd = app.add_subcommand("regret", "per-cycle profit gaps between two algorithms");
  add_common(regret_cmd, true);
  auto* bounds_cmd = app.add_subcommand("bounds", "analytical bound report for a spec");
  add_common(bounds_cmd, true);
  bounds_cmd->add_option("--model", model_path, "JSON regret-model overrides");
  bounds_cmd->add_option("--gap-context", gap_mode, "none|auto: measure slack context by simulation")
      ->check(CLI::IsMember({"none", "auto"}));
  bounds_cmd->add_option("--tsweep", t_sweep, "emit (T, name, value) rows for these cycle lengths");
  auto* example1_cmd = app.add_subcommand("example1", "two-cycle exact-enumeration example");
  add_common(example1_cmd, false);
  auto* fig1_cmd = app.add_subcommand("fig1", "profit vs cycle length under four policy combinations");
  add_common(fig1_cmd, false);
  auto* fig3_cmd = app.add_subcommand("fig3", "look-ahead depth study at a fixed lead time");
  add_common(fig3_cmd, false);
  fig3_cmd->add_option("--lead-time", fig3_lead, "lead time L (paper uses 8 and 10)");
  auto* fig4_cmd = app.add_subcommand("fig4", "look-ahead study across cycle lengths");
  add_common(fig4_cmd, false);
  auto* table1_cmd = app.add_subcommand("table1", "look-ahead uplift grid over (r, lambda, h)");
  add_common(table1_cmd, false);
  auto* multi_cmd = app.add_subcommand("multi", "multi-resource Monte Carlo run");
  add_common(multi_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (simulate_cmd->parsed()) return cmd_simulate(flags);
    if (optimize_cmd->parsed()) return cmd_optimize(flags);
    if (regret_cmd->parsed()) return cmd_regret(flags);
    if (bounds_cmd->parsed()) return cmd_bounds(flags, model_path, gap_mode, t_sweep);
    if (example1_cmd->parsed()) return cmd_example1(flags);
    if (fig1_cmd->parsed()) return cmd_fig1(flags);
    if (fig3_cmd->parsed()) return cmd_fig3(flags, fig3_lead);
    if (fig4_cmd->parsed()) return cmd_fig4(flags);
    if (table1_cmd->parsed()) return cmd_table1(flags);
    if (multi_cmd->parsed()) return cmd_multi(flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const LpError& e) {
    std::cerr << "numeric error: " << e.what() << "\n" << e.dump;
    return kExitNumeric;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
