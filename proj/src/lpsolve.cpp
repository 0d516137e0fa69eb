#include "invsim/lpsolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace invsim {

std::string dump_lp(const LpProblem& p) {
  std::ostringstream os;
  os << "max";
  for (int j = 0; j < p.num_vars(); ++j) os << ' ' << p.objective[j];
  os << '\n';
  for (int i = 0; i < p.num_rows(); ++i) {
    os << "row " << i << ':';
    for (int j = 0; j < p.num_vars(); ++j) os << ' ' << p.row_coeffs(i, j);
    os << " <= " << p.row_upper[i] << '\n';
  }
  os << "bounds:";
  for (int j = 0; j < p.num_vars(); ++j) os << " [0," << p.upper_bounds[j] << ']';
  os << '\n';
  return os.str();
}

namespace {

constexpr int kMaxIterations = 10'000;
constexpr double kPivotTol = 1e-11;

enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper };

}  // namespace

LpSolution solve_lp(const LpProblem& p) {
  const int n = p.num_vars();
  const int m = p.num_rows();
  for (int i = 0; i < m; ++i)
    if (p.row_upper[i] < 0.0)
      throw LpError("solve_lp: negative row upper bound; origin must be feasible", dump_lp(p));

  // Columns 0..n-1 are structural, n..n+m-1 slacks.
  const int total = n + m;
  auto column = [&](int j) -> Eigen::VectorXd {
    if (j < n) return p.row_coeffs.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e[j - n] = 1.0;
    return e;
  };
  auto cost = [&](int j) { return j < n ? p.objective[j] : 0.0; };
  auto upper = [&](int j) { return j < n ? p.upper_bounds[j] : kLpInfinity; };

  std::vector<int> basis(m);
  std::vector<VarStatus> status(total, VarStatus::AtLower);
  for (int i = 0; i < m; ++i) {
    basis[i] = n + i;
    status[n + i] = VarStatus::Basic;
  }

  Eigen::MatrixXd bmat(m, m);
  Eigen::VectorXd xb(m), y(m), w(m);
  std::vector<double> nonbasic_value(total, 0.0);

  int iterations = 0;
  while (true) {
    if (++iterations > kMaxIterations)
      throw LpError("solve_lp: iteration cap exceeded", dump_lp(p));

    for (int i = 0; i < m; ++i) bmat.col(i) = column(basis[i]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(bmat);

    Eigen::VectorXd rhs = p.row_upper;
    for (int j = 0; j < total; ++j)
      if (status[j] == VarStatus::AtUpper) rhs -= column(j) * nonbasic_value[j];
    xb = lu.solve(rhs);

    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) cb[i] = cost(basis[i]);
    y = lu.transpose().solve(cb);

    // Bland: smallest improving index enters.
    int entering = -1;
    for (int j = 0; j < total; ++j) {
      if (status[j] == VarStatus::Basic) continue;
      double d = cost(j) - y.dot(column(j));
      if ((status[j] == VarStatus::AtLower && d > kLpFeasTol) ||
          (status[j] == VarStatus::AtUpper && d < -kLpFeasTol)) {
        entering = j;
        break;
      }
    }
    if (entering < 0) break;  // optimal

    // Movement direction of the entering variable: up from lower, down from upper.
    const double dir = (status[entering] == VarStatus::AtLower) ? 1.0 : -1.0;
    w = lu.solve(column(entering));

    // Ratio test; ties leave by smallest variable index. The entering
    // variable's own span competes as a bound flip.
    double best_t = kLpInfinity;
    int leaving_pos = -1;  // -1 = bound flip
    bool leaving_to_upper = false;
    int best_var = std::numeric_limits<int>::max();
    if (std::isfinite(upper(entering))) {
      best_t = upper(entering);
      best_var = entering;
    }
    for (int i = 0; i < m; ++i) {
      const double rate = dir * w[i];  // basic value i decreases at this rate
      const int var = basis[i];
      double t;
      bool to_upper;
      if (rate > kPivotTol) {
        t = std::max(xb[i], 0.0) / rate;
        to_upper = false;
      } else if (rate < -kPivotTol && std::isfinite(upper(var))) {
        t = std::max(upper(var) - xb[i], 0.0) / (-rate);
        to_upper = true;
      } else {
        continue;
      }
      if (t < best_t - kPivotTol || (t < best_t + kPivotTol && var < best_var)) {
        best_t = std::min(t, best_t);
        best_var = var;
        leaving_pos = i;
        leaving_to_upper = to_upper;
      }
    }

    if (!std::isfinite(best_t))
      throw LpError("solve_lp: unbounded ray detected", dump_lp(p));

    if (leaving_pos < 0) {
      // Entering variable runs to its opposite bound; basis unchanged.
      status[entering] = (dir > 0) ? VarStatus::AtUpper : VarStatus::AtLower;
      nonbasic_value[entering] = (dir > 0) ? upper(entering) : 0.0;
      continue;
    }

    const int leaving = basis[leaving_pos];
    status[leaving] = leaving_to_upper ? VarStatus::AtUpper : VarStatus::AtLower;
    nonbasic_value[leaving] = leaving_to_upper ? upper(leaving) : 0.0;
    basis[leaving_pos] = entering;
    status[entering] = VarStatus::Basic;
  }

  // Assemble the certificate.
  LpSolution sol;
  sol.iterations = iterations;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(total);
  for (int j = 0; j < total; ++j)
    if (status[j] == VarStatus::AtUpper) full[j] = nonbasic_value[j];
  for (int i = 0; i < m; ++i) full[basis[i]] = xb[i];

  sol.x = full.head(n);
  for (int j = 0; j < n; ++j)
    if (std::abs(sol.x[j]) < 1e-12) sol.x[j] = 0.0;
  sol.duals = y;
  sol.reduced_costs.resize(n);
  for (int j = 0; j < n; ++j) sol.reduced_costs[j] = p.objective[j] - y.dot(p.row_coeffs.col(j));
  sol.objective_value = p.objective.dot(sol.x);

  double dual_value = y.dot(p.row_upper);
  for (int j = 0; j < n; ++j) {
    double v = std::max(sol.reduced_costs[j], 0.0);
    if (v > 0.0 && std::isfinite(p.upper_bounds[j])) dual_value += v * p.upper_bounds[j];
  }
  sol.duality_gap = std::abs(dual_value - sol.objective_value);
  return sol;
}

LookaheadLp build_lookahead_lp(const ProblemSpec& spec, int n_tilde, std::int64_t on_hand,
                               std::span<const double> remaining_demand_now,
                               const LookAheadContext& ctx) {
  const int m_types = spec.num_types;
  const int stages = 1 + n_tilde;
  const int nvars = m_types * stages;
  const double h = spec.holding_value();
  const double t_periods = static_cast<double>(spec.periods_per_cycle);

  LookaheadLp lp;
  lp.num_types = m_types;
  lp.num_stages = stages;
  lp.reported_constant = -h * static_cast<double>(n_tilde) * static_cast<double>(on_hand);

  lp.problem.objective.resize(nvars);
  lp.problem.upper_bounds.resize(nvars);
  lp.problem.row_coeffs = Eigen::MatrixXd::Zero(stages, nvars);
  lp.problem.row_upper.resize(stages);

  for (int s = 0; s < stages; ++s) {
    for (int j = 1; j <= m_types; ++j) {
      const int v = lp.var_index(s, j);
      lp.problem.objective[v] =
          spec.reward_value(j) + h * static_cast<double>(n_tilde - s);
      lp.problem.upper_bounds[v] =
          (s == 0) ? remaining_demand_now[static_cast<std::size_t>(j - 1)]
                   : t_periods * spec.lambda(j);
    }
  }
  double cap = static_cast<double>(on_hand);
  for (int k = 0; k < stages; ++k) {
    if (k >= 1) cap += static_cast<double>(ctx.order(k));
    lp.problem.row_upper[k] = cap;
    for (int s = 0; s <= k; ++s)
      for (int j = 1; j <= m_types; ++j) lp.problem.row_coeffs(k, lp.var_index(s, j)) = 1.0;
  }
  return lp;
}

void staircase_sort(const LookaheadLp& lp, StaircaseWorkspace& ws) {
  const int nvars = lp.problem.num_vars();
  ws.order.resize(static_cast<std::size_t>(nvars));
  for (int v = 0; v < nvars; ++v) ws.order[static_cast<std::size_t>(v)] = v;
  const auto& c = lp.problem.objective;
  std::stable_sort(ws.order.begin(), ws.order.end(), [&](int a, int b) {
    if (c[a] != c[b]) return c[a] > c[b];
    return a < b;
  });
}

double staircase_solve(const LookaheadLp& lp, StaircaseWorkspace& ws, std::span<double> x_out) {
  const int stages = lp.num_stages;
  ws.remaining_cap.resize(static_cast<std::size_t>(stages));
  for (int k = 0; k < stages; ++k) ws.remaining_cap[static_cast<std::size_t>(k)] = lp.problem.row_upper[k];

  double objective = 0.0;
  std::fill(x_out.begin(), x_out.end(), 0.0);
  for (int v : ws.order) {
    const int s = lp.stage_of(v);
    double room = lp.problem.upper_bounds[v];
    for (int k = s; k < stages; ++k) room = std::min(room, ws.remaining_cap[static_cast<std::size_t>(k)]);
    if (room <= 0.0) continue;
    x_out[static_cast<std::size_t>(v)] = room;
    objective += lp.problem.objective[v] * room;
    for (int k = s; k < stages; ++k) ws.remaining_cap[static_cast<std::size_t>(k)] -= room;
  }
  return objective;
}

}  // namespace invsim
