#include "invsim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace invsim {

RegretModel RegretModel::bayes_selector_defaults(const ProblemSpec& spec) {
  RegretModel m;
  m.alpha = 0.0;
  const double lambda_min = spec.lambda_min();
  const double r_max = spec.reward_value(spec.num_types);
  m.C1 = 2.0 * r_max * std::exp(-lambda_min) / (lambda_min * lambda_min);
  m.C2 = m.C1 / spec.reward_value(1);
  double min_gap = money_value(spec.rewards[1] - spec.rewards[0]);
  for (std::size_t i = 2; i < spec.rewards.size(); ++i)
    min_gap = std::min(min_gap, money_value(spec.rewards[i] - spec.rewards[i - 1]));
  m.C3 = m.C1 / min_gap;
  return m;
}

RegretModel RegretModel::bayes_selector_defaults_multi(const MultiSpec& mspec) {
  RegretModel m;
  m.alpha = 0.0;
  const double lambda_min = mspec.lambda_min();
  m.C1 = 2.0 * mspec.max_reward() * std::exp(-lambda_min) / (lambda_min * lambda_min);
  double min_reward = mspec.max_reward();
  for (int j = 1; j <= mspec.num_types; ++j)
    for (int l = 0; l < mspec.num_resources; ++l)
      min_reward = std::min(min_reward, mspec.reward_value(j, l));
  m.C2 = m.C1 / min_reward;
  double gap = mspec.min_positive_reward_gap();
  m.C3 = gap > 0.0 ? m.C1 / gap : m.C1;
  return m;
}

void BoundReport::set(const std::string& name, double value) {
  for (auto& [k, v] : values_)
    if (k == name) {
      v = value;
      return;
    }
  values_.emplace_back(name, value);
}

double BoundReport::get(const std::string& name) const {
  for (const auto& [k, v] : values_)
    if (k == name) return v;
  throw std::out_of_range("BoundReport: no value named " + name);
}

bool BoundReport::has(const std::string& name) const {
  for (const auto& [k, v] : values_)
    if (k == name) return true;
  return false;
}

void BoundReport::note(const std::string& text) { notes_.push_back(text); }

nlohmann::ordered_json BoundReport::to_json() const {
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  for (const auto& [k, v] : values_) values[k] = v;
  nlohmann::ordered_json j;
  j["values"] = values;
  j["notes"] = notes_;
  return j;
}

BoundReport BoundReport::from_json(const nlohmann::ordered_json& j) {
  BoundReport r;
  for (const auto& [k, v] : j.at("values").items()) r.set(k, v.get<double>());
  for (const auto& n : j.at("notes")) r.notes_.push_back(n.get<std::string>());
  return r;
}

std::string BoundReport::to_csv(double sweep_key) const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    os << sweep_key << ',' << k << ',' << buf << '\n';
  }
  return os.str();
}

double kingman_expected_inventory(int n_cycles, int periods_per_cycle, double lambda0, double c) {
  const double mu = 1.0 - lambda0;
  const double mean_demand = static_cast<double>(periods_per_cycle) * mu;
  if (c > mean_demand)
    throw std::domain_error("kingman_expected_inventory requires c <= T(1-lambda0)");
  KahanSum sum;
  for (int j = 1; j <= n_cycles; ++j) {
    BinomialLaw law{static_cast<std::int64_t>(j) * periods_per_cycle, mu};
    sum.add(binom_lower_partial(law, static_cast<double>(j) * c) / j);
  }
  return sum.value();
}

std::int64_t backorder_fractile_level(const BinomialLaw& law, double phi) {
  if (!(phi > 0.0) || phi > 1.0)
    throw std::domain_error("backorder_fractile_level requires phi in (0, 1]");
  KahanSum cdf;
  for (std::int64_t k = 0; k <= law.trials; ++k) {
    cdf.add(binom_pmf(law, k));
    if (cdf.value() >= phi - 1e-14) return k;
  }
  return law.trials;
}

namespace {

double backorder_cost(const BinomialLaw& law, double h, double penalty, std::int64_t level) {
  return h * binom_lower_partial(law, static_cast<double>(level)) +
         penalty * binom_upper_partial(law, static_cast<double>(level));
}

}  // namespace

FractileCost a1_upper(int periods, double h, double p, int lead_time, double lambda0) {
  BinomialLaw law{static_cast<std::int64_t>(lead_time + 1) * periods, 1.0 - lambda0};
  FractileCost out;
  out.fractile = (p + lead_time * h) / (p + (lead_time + 1) * h);
  out.level = backorder_fractile_level(law, out.fractile);
  out.value = backorder_cost(law, h, p + lead_time * h, out.level);
  return out;
}

FractileCost a1_lower(int periods, double h, double p, int lead_time, double lambda0) {
  BinomialLaw law{static_cast<std::int64_t>(lead_time + 1) * periods, 1.0 - lambda0};
  FractileCost out;
  out.fractile = p / (p + (lead_time + 1) * h);
  out.level = backorder_fractile_level(law, out.fractile);
  out.value = backorder_cost(law, h, p / (lead_time + 1), out.level);
  return out;
}

namespace {

constexpr double kSeriesTermTol = 1e-12;
constexpr int kSeriesCap = 500'000;

// Hoeffding bound on the holding-series tail beyond n0 terms:
// term_n <= (h/n)(T/(4 delta)) exp(-2 n delta^2 / T) with delta = T mu - c.
double holding_series_tail(int periods, double h, double delta, int n0) {
  const double t = static_cast<double>(periods);
  const double log_rho = -2.0 * delta * delta / t;
  if (log_rho >= 0.0) return std::numeric_limits<double>::infinity();
  double log_lead = std::log(h * t / (4.0 * delta)) + (n0 + 1) * log_rho - std::log1p(-std::exp(log_rho));
  return std::exp(log_lead) / (n0 + 1);
}

}  // namespace

SeriesValue constant_order_cost(int periods, double h, double p, double lambda0, double c) {
  const double mu = 1.0 - lambda0;
  const double mean_demand = static_cast<double>(periods) * mu;
  const double delta = mean_demand - c;
  if (!(delta > 0.0))
    throw std::domain_error("constant_order_cost requires c < T(1-lambda0)");

  SeriesValue out;
  KahanSum holding;
  int n = 0;
  while (true) {
    ++n;
    if (n > kSeriesCap)
      throw std::domain_error("constant_order_cost: series did not converge");
    BinomialLaw law{static_cast<std::int64_t>(n) * periods, mu};
    double term = h * binom_lower_partial(law, static_cast<double>(n) * c) / n;
    holding.add(term);
    double tail = holding_series_tail(periods, h, delta, n);
    if (term < kSeriesTermTol && tail < kSeriesTermTol) {
      out.truncation_bound = tail;
      break;
    }
  }
  out.terms = n;
  out.value = holding.value() + p * mean_demand - p * c;
  return out;
}

namespace {

// A continuized binomial cdf in the threshold: the unit step up to cdf(k+1)
// is packed into the window (k+1-sigma, k+1], so the function is continuous
// and strictly increasing while staying within sigma of the exact step.
constexpr double kCdfWindow = 1e-3;

double continuized_cdf(const BinomialLaw& law, double x) {
  if (x < 0.0) return 0.0;
  if (x >= static_cast<double>(law.trials)) return 1.0;
  double k = std::floor(x);
  std::int64_t ki = static_cast<std::int64_t>(k);
  double base = binom_cdf(law, ki);
  double frac = x - k;
  if (frac <= 1.0 - kCdfWindow) return base;
  return base + (frac - (1.0 - kCdfWindow)) / kCdfWindow * binom_pmf(law, ki + 1);
}

// sum_n Pr(Binomial(nT,mu) <= n c), evaluated until terms fall below the
// truncation tolerance or the partial sum clears stop_above.
double foc_series(int periods, double lambda0, double c, double stop_above, double* residual_scale) {
  const double mu = 1.0 - lambda0;
  KahanSum sum;
  double prev_term = 1.0;
  int small_streak = 0;
  for (int n = 1; n <= kSeriesCap; ++n) {
    BinomialLaw law{static_cast<std::int64_t>(n) * periods, mu};
    double term = continuized_cdf(law, static_cast<double>(n) * c);
    sum.add(term);
    if (sum.value() > stop_above) return sum.value();
    small_streak = (term < kSeriesTermTol) ? small_streak + 1 : 0;
    if (small_streak >= 3) {
      if (residual_scale && prev_term > 0.0 && term < prev_term) {
        double ratio = term / prev_term;
        *residual_scale = ratio < 1.0 ? term * ratio / (1.0 - ratio) : term;
      }
      return sum.value();
    }
    prev_term = term;
  }
  throw std::domain_error("foc_series: series did not converge");
}

}  // namespace

CstarResult cstar_and_a2(int periods, double h, double p, double lambda0) {
  if (!(h > 0.0) || !(p > 0.0)) throw std::domain_error("cstar_and_a2 requires h > 0, p > 0");
  const double mu = 1.0 - lambda0;
  const double mean_demand = static_cast<double>(periods) * mu;
  if (!(mean_demand > 0.0)) throw std::domain_error("cstar_and_a2 requires 1 - lambda0 > 0");
  const double target = p / h;
  const double stop = target + 10.0;

  double lo = 0.0;
  double hi = mean_demand * (1.0 - 1e-9);
  if (foc_series(periods, lambda0, lo, stop, nullptr) >= target)
    throw std::domain_error("cstar_and_a2: first-order condition has no root above c = 0");
  if (foc_series(periods, lambda0, hi, stop, nullptr) < target)
    throw std::domain_error("cstar_and_a2: first-order condition has no root below T(1-lambda0)");

  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, mean_demand); ++it) {
    double mid = 0.5 * (lo + hi);
    if (foc_series(periods, lambda0, mid, stop, nullptr) < target)
      lo = mid;
    else
      hi = mid;
  }

  CstarResult out;
  out.cstar = 0.5 * (lo + hi);
  double tail_scale = 0.0;
  double value = foc_series(periods, lambda0, out.cstar, std::numeric_limits<double>::infinity(), &tail_scale);
  out.foc_residual = std::abs(value - target);
  SeriesValue cost = constant_order_cost(periods, h, p, lambda0, out.cstar);
  out.a2 = cost.value;
  out.a2_truncation_bound = cost.truncation_bound;
  out.series_terms = cost.terms;
  return out;
}

GapEnvelope replenishment_gap_envelope(const ProblemSpec& spec) {
  require_valid(spec);
  const int t = spec.periods_per_cycle;
  const int lead = spec.lead_time;
  const double h = spec.holding_value();
  const double lambda0 = spec.lambda0();
  const double r1 = spec.reward_value(1);
  const double rm = spec.reward_value(spec.num_types);
  GapEnvelope env;
  env.lower = cstar_and_a2(t, h, r1, lambda0).a2 - a1_upper(t, h, rm, lead, lambda0).value;
  env.upper = cstar_and_a2(t, h, rm, lambda0).a2 - a1_lower(t, h, r1, lead, lambda0).value;
  return env;
}

OfflineGreedyConstants offline_greedy_constants(const ProblemSpec& spec) {
  OfflineGreedyConstants out;
  const int m = spec.num_types;
  out.a_k.reserve(static_cast<std::size_t>(m - 1));
  double a_min = std::numeric_limits<double>::infinity();
  for (int k = 2; k <= m; ++k) {
    double lead_value = 0.0, lead_mass = 0.0;
    for (int j = k; j <= m; ++j) {
      lead_value += spec.reward_value(j) * spec.lambda(j);
      lead_mass += spec.lambda(j);
    }
    double a_k = lead_value - spec.reward_value(k - 1) * lead_mass;
    out.a_k.push_back(a_k);
    a_min = std::min(a_min, a_k);
  }
  out.a_min = a_min;
  double m1 = 0.0;
  for (int j = 1; j <= m; ++j) m1 += std::sqrt(spec.lambda(j) * (1.0 - spec.lambda(j)));
  out.m1 = m1;
  out.k2 = 0.5;
  return out;
}

OfflineGreedyBounds offline_greedy_bounds(const ProblemSpec& spec, double delta_off,
                                          double delta_greedy, double p_mid) {
  if (delta_off < 0.0 || delta_greedy < 0.0)
    throw std::domain_error("offline_greedy_bounds requires nonnegative slacks");
  if (p_mid < 0.0 || p_mid > 1.0)
    throw std::domain_error("offline_greedy_bounds requires p_mid in [0, 1]");
  const OfflineGreedyConstants constants = offline_greedy_constants(spec);
  const double lambda0 = spec.lambda0();
  const double mu = 1.0 - lambda0;
  const double sqrt_t = std::sqrt(static_cast<double>(spec.periods_per_cycle));
  const double lead1 = static_cast<double>(spec.lead_time + 1);
  const double r_spread = spec.reward_value(spec.num_types) - spec.reward_value(1);

  OfflineGreedyBounds out;
  out.upper = r_spread * ((mu - spec.lambda(1)) / mu) *
              (delta_off / lead1 + (constants.k2 + std::sqrt(mu * lambda0)) * sqrt_t);
  out.lower_all_T = (constants.a_min / mu) * (delta_greedy / (4.0 * lead1)) * p_mid - constants.m1 * sqrt_t;
  out.lower_large_T = constants.a_min / (2.0 * mu * lead1) * delta_greedy -
                      (constants.a_min * constants.k2 / mu + constants.m1) * sqrt_t;
  return out;
}

double bennett_h(double u) { return (1.0 + u) * std::log1p(u) - u; }

ThetaBound minimize_theta_term(int periods, double lambda0, double c, const RegretModel& model,
                               int grid_points) {
  const double t = static_cast<double>(periods);
  const double mu = 1.0 - lambda0;
  const double t_alpha = std::pow(t, model.alpha);
  ThetaBound out;
  if (model.alpha >= 1.0) {
    out.reason = "theta term applies only to alpha < 1";
    return out;
  }
  if (!(c < t * mu - model.C2 * t_alpha)) {
    out.reason = "requires c < T(1-lambda0) - C2 T^alpha";
    return out;
  }
  const double delta_c = (t * mu - c) / t;
  const double theta_max = delta_c / (4.0 * mu);
  double best_term = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    // log-spaced over six decades up to theta_max
    double frac = grid_points > 1 ? static_cast<double>(i) / (grid_points - 1) : 1.0;
    double theta = theta_max * std::pow(10.0, -6.0 * (1.0 - frac));
    double log_beta = theta * c + theta * model.C2 * t_alpha +
                      0.5 * model.C2 * std::pow(t, model.alpha - 1.0) * bennett_h(2.0 * theta * t) +
                      0.5 * t * std::log(lambda0 + mu * std::exp(-2.0 * theta));
    if (log_beta >= 0.0) continue;
    double term = -std::log1p(-std::exp(log_beta)) / (std::exp(1.0) * theta);
    if (term < best_term) {
      best_term = term;
      out.theta_star = theta;
      out.beta_star = std::exp(log_beta);
      out.theta_term = term;
      out.vacuous = false;
    }
  }
  if (out.vacuous) out.reason = "no grid theta gives beta < 1; bound vacuous at this T";
  return out;
}

BoundReport regret_envelopes(const ProblemSpec& spec, const RegretModel& model,
                             const std::optional<GapContext>& ctx) {
  require_valid(spec);
  BoundReport report;
  const double t = static_cast<double>(spec.periods_per_cycle);
  const int periods = spec.periods_per_cycle;
  const int lead = spec.lead_time;
  const double h = spec.holding_value();
  const double lambda0 = spec.lambda0();
  const double r1 = spec.reward_value(1);
  const double rm = spec.reward_value(spec.num_types);
  const double t_alpha = std::pow(t, model.alpha);

  report.set("T", t);
  report.set("L", static_cast<double>(lead));
  report.set("alpha", model.alpha);
  report.set("C1", model.C1);
  report.set("C2", model.C2);
  report.set("C3", model.C3);
  report.set("K_stability", model.K_stability);
  report.set("lambda_min", spec.lambda_min());

  // Base-stock regret envelope.
  report.set("theorem1_bound", model.C1 * t_alpha + h * model.C2 * (lead + 1) * t_alpha);

  // Replenishment gap pieces.
  FractileCost up_rm = a1_upper(periods, h, rm, lead, lambda0);
  FractileCost lo_r1 = a1_lower(periods, h, r1, lead, lambda0);
  CstarResult c_r1 = cstar_and_a2(periods, h, r1, lambda0);
  CstarResult c_rm = cstar_and_a2(periods, h, rm, lambda0);
  report.set("a1_upper_rM", up_rm.value);
  report.set("a1_upper_level", static_cast<double>(up_rm.level));
  report.set("a1_upper_fractile", up_rm.fractile);
  report.set("a1_lower_r1", lo_r1.value);
  report.set("a1_lower_level", static_cast<double>(lo_r1.level));
  report.set("a1_lower_fractile", lo_r1.fractile);
  report.set("cstar_r1", c_r1.cstar);
  report.set("cstar_r1_foc_residual", c_r1.foc_residual);
  report.set("a2_r1", c_r1.a2);
  report.set("a2_r1_truncation", c_r1.a2_truncation_bound);
  report.set("cstar_rM", c_rm.cstar);
  report.set("cstar_rM_foc_residual", c_rm.foc_residual);
  report.set("a2_rM", c_rm.a2);
  report.set("a2_rM_truncation", c_rm.a2_truncation_bound);
  report.set("replenishment_gap_lower", c_r1.a2 - up_rm.value);
  report.set("replenishment_gap_upper", c_rm.a2 - lo_r1.value);

  // Offline-vs-greedy constants.
  OfflineGreedyConstants constants = offline_greedy_constants(spec);
  for (std::size_t i = 0; i < constants.a_k.size(); ++i)
    report.set("A_" + std::to_string(i + 2), constants.a_k[i]);
  report.set("A", constants.a_min);
  report.set("M1", constants.m1);
  report.set("K2", constants.k2);

  // Constant-order regret envelope.
  if (model.alpha < 1.0) {
    double c_for_theta = ctx ? ctx->c_off : c_r1.cstar;
    report.set("theta_c", c_for_theta);
    ThetaBound theta = minimize_theta_term(periods, lambda0, c_for_theta, model);
    if (theta.vacuous) {
      report.note("theorem2: " + theta.reason);
    } else {
      report.set("theta_star", theta.theta_star);
      report.set("beta_theta_star", theta.beta_star);
      report.set("theta_term", theta.theta_term);
      report.set("theorem2_bound",
                 model.C1 * t_alpha + h * (model.C2 * t_alpha + theta.theta_term));
    }
  } else {
    report.set("theorem2_alpha1_bound", model.C1 * t + h * model.K_stability * t);
    report.note("theorem2: alpha = 1 uses the exposed stability constant K_stability");
  }

  report.set("theorem6_bound", (rm - r1 - h) * model.C2 * t_alpha);

  if (ctx) {
    OfflineGreedyBounds og = offline_greedy_bounds(spec, ctx->delta_off, ctx->delta_greedy, ctx->p_mid);
    report.set("delta_off", ctx->delta_off);
    report.set("delta_greedy", ctx->delta_greedy);
    report.set("p_mid", ctx->p_mid);
    report.set("offline_greedy_upper", og.upper);
    report.set("offline_greedy_lower_all_T", og.lower_all_T);
    report.set("offline_greedy_lower_large_T", og.lower_large_T);

    // Combined two-sided bound on the greedy-base-stock vs online-constant gap.
    double lb = report.get("replenishment_gap_lower") - og.lower_large_T -
                (rm - r1 - h) * model.C2 * t_alpha;
    report.set("combined_lower", lb);
    double online_constant_term;
    if (model.alpha < 1.0 && report.has("theorem2_bound")) {
      online_constant_term = report.get("theorem2_bound");
    } else if (model.alpha >= 1.0) {
      online_constant_term = report.get("theorem2_alpha1_bound");
    } else {
      online_constant_term = std::numeric_limits<double>::quiet_NaN();
      report.note("combined_upper: theta term vacuous, upper bound unavailable");
    }
    report.set("combined_upper",
               report.get("replenishment_gap_upper") - og.lower_all_T + online_constant_term);
  } else {
    report.note("combined bounds skipped: no measured slack context supplied");
  }
  return report;
}

BoundReport multires_bound_calculators(const MultiSpec& mspec, const RegretModel& model,
                                       const std::optional<std::vector<std::int64_t>>& c_levels) {
  auto violations = validate_multi(mspec);
  if (!violations.empty())
    throw std::invalid_argument("invalid MultiSpec: " + violations.front());
  BoundReport report;
  const double t = static_cast<double>(mspec.periods_per_cycle);
  const double t_alpha = std::pow(t, model.alpha);
  const double lambda0 = mspec.lambda0();
  const double mu = 1.0 - lambda0;

  report.set("T", t);
  report.set("d", static_cast<double>(mspec.num_resources));
  report.set("alpha", model.alpha);
  report.set("C1", model.C1);
  report.set("C3", model.C3);
  report.set("r_max", mspec.max_reward());
  report.set("h_max", mspec.max_holding());

  double reward_term = 0.0, holding_term = 0.0;
  for (int l = 0; l < mspec.num_resources; ++l) {
    double lead = static_cast<double>(mspec.lead_times[static_cast<std::size_t>(l)]);
    reward_term += mspec.resource_max_reward(l) * lead * model.C3 * t_alpha;
    holding_term += money_value(mspec.holding[static_cast<std::size_t>(l)]) *
                    (lead * lead - lead + 2.0) * model.C3 * t_alpha;
  }
  report.set("theorem7_bound", model.C1 * t_alpha + reward_term + holding_term);

  if (c_levels) {
    if (static_cast<int>(c_levels->size()) != mspec.num_resources)
      throw std::invalid_argument("multires_bound_calculators: one c per resource required");
    double c_total = 0.0;
    for (std::int64_t c : *c_levels) c_total += static_cast<double>(c);
    report.set("c_total", c_total);
    if (!(c_total < t * mu))
      throw std::domain_error("multires bounds require sum(c) < T(1-lambda0)");
    const double delta_prime = (t * mu - c_total) / t;
    report.set("delta_c_prime", delta_prime);
    double lemma12 = -2.0 * mu / delta_prime *
                     std::log1p(-std::exp(-t * delta_prime * delta_prime / (8.0 * mu)));
    report.set("aggregate_offline_inventory_bound", lemma12);

    if (model.alpha < 1.0) {
      ThetaBound theta = minimize_theta_term(mspec.periods_per_cycle, lambda0, c_total, model);
      if (theta.vacuous) {
        report.note("theorem8: " + theta.reason);
      } else {
        report.set("theta_star", theta.theta_star);
        report.set("beta_theta_star", theta.beta_star);
        report.set("theorem8_bound",
                   model.C1 * t_alpha + mspec.max_reward() * lemma12 +
                       mspec.max_holding() * (model.C2 * t_alpha + theta.theta_term));
      }
    } else {
      report.set("theorem8_alpha1_bound",
                 model.C1 * t + mspec.max_reward() * lemma12 + mspec.max_holding() * model.K_stability * t);
      report.note("theorem8: alpha = 1 uses the exposed stability constant K_stability");
    }
  } else {
    report.note("aggregate constant-order rows skipped: no per-resource order quantities supplied");
  }
  return report;
}

double fit_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_log_slope requires two or more matched points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

}  // namespace invsim
