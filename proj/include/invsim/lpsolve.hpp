#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "invsim/core.hpp"

namespace invsim {

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kLpFeasTol = 1e-9;
inline constexpr double kLpGapTol = 1e-8;  // relative: gap <= tol * (1 + |objective|)

// max c'x subject to A x <= b, 0 <= x <= u. Every LP this project builds has
// b >= 0, so the origin is feasible and no phase-1 is needed.
struct LpProblem {
  Eigen::VectorXd objective;     // c
  Eigen::MatrixXd row_coeffs;    // A
  Eigen::VectorXd row_upper;     // b
  Eigen::VectorXd upper_bounds;  // u, +infinity allowed

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(row_upper.size()); }
};

struct LpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd duals;          // one per row, >= 0
  Eigen::VectorXd reduced_costs;  // c - A'y per variable
  double objective_value = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
};

struct LpError : std::runtime_error {
  LpError(const std::string& message, std::string lp_dump)
      : std::runtime_error(message), dump(std::move(lp_dump)) {}
  std::string dump;
};

std::string dump_lp(const LpProblem& p);

// Dense bounded-variable simplex under Bland's rule (lowest eligible index
// enters, lowest blocking index leaves), so degenerate ties resolve the same
// way on every platform. Iteration cap 10,000. Throws LpError on an unbounded
// ray or a cap hit, with the plain-text LP attached.
LpSolution solve_lp(const LpProblem& p);

// Replenishment arriving over the look-ahead window plus the expected future
// demand per cycle, T*lambda_j, derived from the spec at build time.
struct LookAheadContext {
  std::vector<std::int64_t> future_orders;  // O^{n+1}..O^{n+Ntilde}

  std::int64_t order(int i) const {  // 1-based, zero beyond what is known
    return (i >= 1 && i <= static_cast<int>(future_orders.size()))
               ? future_orders[static_cast<std::size_t>(i - 1)]
               : 0;
  }
};

// The per-period re-solve LP in eliminated form: the rejected split
// v0 = demand - v is dropped against the variable's upper bound. Stage 0 holds
// the current cycle, stage i the i-th look-ahead cycle; a stage-s variable
// consumes capacity in rows s..Ntilde. The constant -h*Ntilde*I_t does not
// move the argmax and is kept aside in reported_constant.
struct LookaheadLp {
  LpProblem problem;
  int num_types = 0;
  int num_stages = 0;  // 1 + Ntilde
  double reported_constant = 0.0;

  int var_index(int stage, int type) const { return stage * num_types + (type - 1); }
  int current_var(int type) const { return var_index(0, type); }
  int stage_of(int var) const { return var / num_types; }
};

LookaheadLp build_lookahead_lp(const ProblemSpec& spec, int n_tilde, std::int64_t on_hand,
                               std::span<const double> remaining_demand_now,
                               const LookAheadContext& ctx);

// The production path for the nested (staircase) capacity system: allocate in
// descending objective coefficient, lowest variable index first on ties. For
// this structure the greedy point is optimal; the simplex above is the
// certified reference it is tested against.
struct StaircaseWorkspace {
  std::vector<int> order;             // variable indices, sorted once per coefficient vector
  std::vector<double> remaining_cap;  // scratch, one per row
};

void staircase_sort(const LookaheadLp& lp, StaircaseWorkspace& ws);
double staircase_solve(const LookaheadLp& lp, StaircaseWorkspace& ws, std::span<double> x_out);

}  // namespace invsim
