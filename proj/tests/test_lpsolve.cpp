#include <doctest.h>

#include <random>

#include "invsim/lpsolve.hpp"

using namespace invsim;

namespace {

// Independent oracle: enumerate every basic point (n active constraints among
// rows and bounds), keep the best feasible objective. Only used on tiny LPs.
double vertex_enumeration_optimum(const LpProblem& p) {
  const int n = p.num_vars();
  const int m = p.num_rows();
  std::vector<int> constraint_ids;  // 0..m-1 rows, m+j lower bound j, m+n+j upper bound j
  for (int i = 0; i < m; ++i) constraint_ids.push_back(i);
  for (int j = 0; j < n; ++j) constraint_ids.push_back(m + j);
  for (int j = 0; j < n; ++j)
    if (std::isfinite(p.upper_bounds[j])) constraint_ids.push_back(m + n + j);

  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(n));
  std::vector<int> idx(static_cast<std::size_t>(n));
  const int total = static_cast<int>(constraint_ids.size());
  if (total < n) return best;
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd rhs(n);
    for (int r = 0; r < n; ++r) {
      int id = constraint_ids[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])];
      if (id < m) {
        a.row(r) = p.row_coeffs.row(id);
        rhs[r] = p.row_upper[id];
      } else if (id < m + n) {
        a.row(r).setZero();
        a(r, id - m) = 1.0;
        rhs[r] = 0.0;
      } else {
        a.row(r).setZero();
        a(r, id - m - n) = 1.0;
        rhs[r] = p.upper_bounds[id - m - n];
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.isInvertible()) {
      Eigen::VectorXd x = lu.solve(rhs);
      bool feasible = true;
      for (int j = 0; j < n && feasible; ++j)
        feasible = x[j] >= -1e-8 && x[j] <= p.upper_bounds[j] + 1e-8;
      for (int i = 0; i < m && feasible; ++i)
        feasible = p.row_coeffs.row(i).dot(x) <= p.row_upper[i] + 1e-8;
      if (feasible) best = std::max(best, p.objective.dot(x));
    }
    // next combination
    int r = n - 1;
    while (r >= 0 && idx[static_cast<std::size_t>(r)] == total - n + r) --r;
    if (r < 0) break;
    ++idx[static_cast<std::size_t>(r)];
    for (int q = r + 1; q < n; ++q) idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q - 1)] + 1;
  }
  return best;
}

ProblemSpec example_spec() {
  ProblemSpec spec;
  spec.num_types = 3;
  spec.periods_per_cycle = 2;
  spec.num_cycles = 2;
  spec.lead_time = 1;
  spec.rewards = {to_money(1), to_money(9), to_money(10)};
  spec.arrival_probs = {0.3, 0.3, 0.3, 0.1};
  spec.holding_cost = to_money(0.5);
  return spec;
}

LpProblem random_staircase(std::mt19937_64& rng, LookaheadLp& out) {
  std::uniform_int_distribution<int> m_dist(2, 4), nt_dist(0, 3), inv_dist(0, 8), order_dist(0, 5);
  std::uniform_real_distribution<double> lam(0.05, 0.4), h_dist(0.5, 3.0);
  ProblemSpec spec;
  spec.num_types = m_dist(rng);
  spec.periods_per_cycle = 6;
  spec.num_cycles = 2;
  spec.lead_time = 5;
  double total = 0.0;
  std::vector<double> lams;
  for (int j = 0; j < spec.num_types; ++j) {
    lams.push_back(lam(rng));
    total += lams.back();
  }
  spec.arrival_probs.push_back(std::max(0.0, 1.0 - total));
  for (double l : lams) spec.arrival_probs.push_back(l);
  double r = 0.0;
  for (int j = 0; j < spec.num_types; ++j) {
    r += 1.0 + 9.0 * std::generate_canonical<double, 53>(rng);
    spec.rewards.push_back(to_money(r));
  }
  spec.holding_cost = to_money(h_dist(rng));

  int n_tilde = nt_dist(rng);
  LookAheadContext ctx;
  for (int i = 0; i < n_tilde; ++i) ctx.future_orders.push_back(order_dist(rng));
  std::vector<double> remaining;
  for (int j = 1; j <= spec.num_types; ++j)
    remaining.push_back(spec.lambda(j) * (1 + 5 * std::generate_canonical<double, 53>(rng)));
  out = build_lookahead_lp(spec, n_tilde, inv_dist(rng), remaining, ctx);
  return out.problem;
}

}  // namespace

TEST_CASE("single bounded variable") {
  LpProblem p;
  p.objective = Eigen::VectorXd::Constant(1, 1.0);
  p.row_coeffs = Eigen::MatrixXd::Constant(1, 1, 1.0);
  p.row_upper = Eigen::VectorXd::Constant(1, 3.0);
  p.upper_bounds = Eigen::VectorXd::Constant(1, 5.0);
  LpSolution sol = solve_lp(p);
  CHECK(sol.x[0] == doctest::Approx(3.0));
  CHECK(sol.objective_value == doctest::Approx(3.0));
  CHECK(sol.duality_gap <= 1e-9);
}

TEST_CASE("negative row bound is rejected") {
  LpProblem p;
  p.objective = Eigen::VectorXd::Constant(1, 1.0);
  p.row_coeffs = Eigen::MatrixXd::Constant(1, 1, 1.0);
  p.row_upper = Eigen::VectorXd::Constant(1, -1.0);
  p.upper_bounds = Eigen::VectorXd::Constant(1, 5.0);
  CHECK_THROWS_AS(solve_lp(p), LpError);
}

TEST_CASE("unbounded ray raises") {
  LpProblem p;
  p.objective = Eigen::VectorXd::Constant(1, 1.0);
  p.row_coeffs = Eigen::MatrixXd::Zero(1, 1);
  p.row_upper = Eigen::VectorXd::Constant(1, 1.0);
  p.upper_bounds = Eigen::VectorXd::Constant(1, kLpInfinity);
  CHECK_THROWS_AS(solve_lp(p), LpError);
}

TEST_CASE("period-1 packing of the two-cycle example") {
  ProblemSpec spec = example_spec();
  std::vector<double> remaining = {0.6, 0.6, 0.2};  // (T-t+1) lambda_j at t=1
  LookaheadLp lp = build_lookahead_lp(spec, 0, 1, remaining, {});
  CHECK(lp.problem.num_vars() == 3);
  CHECK(lp.problem.num_rows() == 1);

  LpSolution sol = solve_lp(lp.problem);
  CHECK(sol.objective_value == doctest::Approx(7.6).epsilon(1e-12));
  CHECK(sol.duality_gap <= 1e-8 * (1 + sol.objective_value));
  CHECK(vertex_enumeration_optimum(lp.problem) == doctest::Approx(7.6).epsilon(1e-9));

  StaircaseWorkspace ws;
  staircase_sort(lp, ws);
  std::vector<double> x(3, 0.0);
  double greedy = staircase_solve(lp, ws, x);
  CHECK(greedy == doctest::Approx(7.6).epsilon(1e-12));
  CHECK(x[lp.current_var(3)] == doctest::Approx(0.2));
  CHECK(x[lp.current_var(2)] == doctest::Approx(0.6));
  CHECK(x[lp.current_var(1)] == doctest::Approx(0.2));
}

TEST_CASE("look-ahead LP structure counts") {
  ProblemSpec spec = example_spec();
  std::vector<double> remaining = {0.6, 0.6, 0.2};
  LookAheadContext ctx{{2, 3}};
  LookaheadLp lp = build_lookahead_lp(spec, 2, 4, remaining, ctx);
  CHECK(lp.problem.num_vars() == 9);
  CHECK(lp.problem.num_rows() == 3);
  CHECK(lp.problem.row_upper[0] == doctest::Approx(4.0));
  CHECK(lp.problem.row_upper[1] == doctest::Approx(6.0));
  CHECK(lp.problem.row_upper[2] == doctest::Approx(9.0));
  CHECK(lp.reported_constant == doctest::Approx(-0.5 * 2 * 4));
}

TEST_CASE("deterministic tie: equal coefficients allocate to the lower index first") {
  LpProblem p;
  p.objective = Eigen::VectorXd::Constant(2, 1.0);
  p.row_coeffs = Eigen::MatrixXd::Constant(1, 2, 1.0);
  p.row_upper = Eigen::VectorXd::Constant(1, 1.0);
  p.upper_bounds = Eigen::VectorXd::Constant(2, 1.0);
  LookaheadLp lp;
  lp.problem = p;
  lp.num_types = 2;
  lp.num_stages = 1;
  StaircaseWorkspace ws;
  staircase_sort(lp, ws);
  std::vector<double> x(2, 0.0);
  staircase_solve(lp, ws, x);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(0.0));
}

TEST_CASE("eliminated rejection split matches the explicit formulation") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    LookaheadLp lp;
    random_staircase(rng, lp);
    LpSolution eliminated = solve_lp(lp.problem);

    // Explicit form: add v0 variables with zero objective and rows v + v0 <= demand.
    const int n = lp.problem.num_vars();
    LpProblem full;
    full.objective = Eigen::VectorXd::Zero(2 * n);
    full.objective.head(n) = lp.problem.objective;
    full.upper_bounds = Eigen::VectorXd::Constant(2 * n, kLpInfinity);
    full.row_coeffs = Eigen::MatrixXd::Zero(lp.problem.num_rows() + n, 2 * n);
    full.row_upper.resize(lp.problem.num_rows() + n);
    full.row_coeffs.topLeftCorner(lp.problem.num_rows(), n) = lp.problem.row_coeffs;
    full.row_upper.head(lp.problem.num_rows()) = lp.problem.row_upper;
    for (int j = 0; j < n; ++j) {
      full.row_coeffs(lp.problem.num_rows() + j, j) = 1.0;
      full.row_coeffs(lp.problem.num_rows() + j, n + j) = 1.0;
      full.row_upper[lp.problem.num_rows() + j] = lp.problem.upper_bounds[j];
    }
    LpSolution explicit_form = solve_lp(full);
    double scale = 1.0 + std::abs(eliminated.objective_value);
    CHECK(std::abs(eliminated.objective_value - explicit_form.objective_value) <= 1e-8 * scale);
    for (int j = 0; j < n; ++j) {
      double v0 = lp.problem.upper_bounds[j] - eliminated.x[j];
      CHECK(v0 >= -1e-9);
    }
  }
}

TEST_CASE("greedy staircase matches the certified simplex on random instances") {
  std::mt19937_64 rng(23);
  StaircaseWorkspace ws;
  for (int trial = 0; trial < 300; ++trial) {
    LookaheadLp lp;
    random_staircase(rng, lp);
    staircase_sort(lp, ws);
    std::vector<double> x(static_cast<std::size_t>(lp.problem.num_vars()), 0.0);
    double greedy = staircase_solve(lp, ws, x);
    LpSolution sol = solve_lp(lp.problem);
    double scale = 1.0 + std::abs(sol.objective_value);
    CHECK(std::abs(greedy - sol.objective_value) <= 1e-8 * scale);
    CHECK(sol.duality_gap <= 1e-8 * scale);
  }
}

TEST_CASE("simplex matches vertex enumeration on random small LPs") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> n_dist(1, 6), m_dist(1, 4);
  std::uniform_real_distribution<double> coef(-1.0, 2.0), bound(0.0, 4.0), cost(-1.0, 3.0);
  for (int trial = 0; trial < 120; ++trial) {
    LpProblem p;
    int n = n_dist(rng), m = m_dist(rng);
    p.objective.resize(n);
    p.upper_bounds.resize(n);
    p.row_coeffs.resize(m, n);
    p.row_upper.resize(m);
    for (int j = 0; j < n; ++j) {
      p.objective[j] = cost(rng);
      p.upper_bounds[j] = bound(rng) + 0.5;
    }
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) p.row_coeffs(i, j) = std::max(0.0, coef(rng));
      p.row_upper[i] = bound(rng);
    }
    LpSolution sol = solve_lp(p);
    double oracle = vertex_enumeration_optimum(p);
    CHECK(sol.objective_value == doctest::Approx(oracle).epsilon(1e-7));
    CHECK(sol.duality_gap <= 1e-8 * (1 + std::abs(sol.objective_value)));
  }
}

TEST_CASE("dump format carries the objective, rows and bounds") {
  LpProblem p;
  p.objective = Eigen::VectorXd::Constant(1, 2.0);
  p.row_coeffs = Eigen::MatrixXd::Constant(1, 1, 1.0);
  p.row_upper = Eigen::VectorXd::Constant(1, 3.0);
  p.upper_bounds = Eigen::VectorXd::Constant(1, 5.0);
  std::string dump = dump_lp(p);
  CHECK(dump.find("max 2") != std::string::npos);
  CHECK(dump.find("row 0: 1 <= 3") != std::string::npos);
  CHECK(dump.find("bounds: [0,5]") != std::string::npos);
}
