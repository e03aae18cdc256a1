#pragma once

#include "stodec/linprog.hpp"
#include "stodec/model.hpp"
#include "stodec/parallel.hpp"
#include "stodec/types.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace stodec {

/**
 * L-shaped decomposition.  The master problem
 *
 *   maximize  <c, x> + theta
 *   s.t.      A x <= b,  x >= 0,  theta <= theta_init,
 *             theta <= intercept_t + <gradient_t, x>   for every stored cut
 *
 * overestimates the true objective; each iteration solves the scenario
 * recourse LPs at the master's x, forms the exact incumbent value, and adds
 * one aggregated optimality cut from the recourse duals pi_s:
 *
 *   gradient = -sum_s P(s) T_s' pi_s,   intercept = sum_s P(s) <pi_s, h_s>,
 *
 * valid by weak duality and tight at the generating x.  Iteration stops when
 * (UB - incumbent)/max(|UB|, 1) <= gap_tol.  theta is free in sign and is
 * modeled as theta_plus - theta_minus inside the canonical-form LP.
 *
 * theta_init is the probability-weighted sum of per-scenario bounds from
 * maximize <q,y> s.t. W y <= h + ||T||_F * R * 1 with R the first-stage
 * radius bound; if any bounding LP is unbounded the cap falls back to 1e9
 * and a warning is recorded.
 */

struct OptimalityCut {
  Vector gradient;
  double intercept = 0.0;
};

struct BendersResult {
  double objective = std::numeric_limits<double>::quiet_NaN();
  Vector x_best;
  int iterations = 0;
  /// One (master upper bound, best incumbent) pair per iteration.
  std::vector<std::pair<double, double>> gap_history;
  bool converged = false;
  double final_gap = std::numeric_limits<double>::infinity();
  std::vector<OptimalityCut> cuts;
  std::vector<std::string> warnings;
};

namespace detail {

inline double benders_theta_cap(const StochasticProgram& prog, const SolverOptions& opts,
                                int threads, std::vector<std::string>& warnings) {
  const double radius = max_feasible_norm(prog.first_stage, opts);
  const int S = prog.num_scenarios();
  std::vector<LpSolution> bounds(static_cast<size_t>(S));
  parallel_for(S, threads, [&](Index s) {
    const auto& sc = prog.scenarios[static_cast<size_t>(s)];
    const double slack = sc.T.norm() * radius;
    bounds[static_cast<size_t>(s)] =
        solve_lp(LpProblem{sc.q, sc.W, sc.h + Vector::Constant(sc.m2(), slack)}, opts);
  });
  double cap = 0.0;
  for (int s = 0; s < S; ++s) {
    const auto& sol = bounds[static_cast<size_t>(s)];
    if (sol.status == LpStatus::Unbounded) {
      warnings.push_back("theta bound: scenario " + std::to_string(s) +
                         " bounding LP is unbounded; falling back to 1e9");
      return 1e9;
    }
    if (sol.status == LpStatus::Infeasible)
      throw RecourseInfeasible(
          "theta bound: scenario " + std::to_string(s) +
              " recourse is infeasible for every feasible first stage",
          s);
    cap += prog.scenarios[static_cast<size_t>(s)].probability * sol.objective;
  }
  return cap;
}

}  // namespace detail

inline BendersResult run_benders(const StochasticProgram& prog, double gap_tol = 0.02,
                                 int max_iters = 500, const SolverOptions& opts = {},
                                 int threads = 0) {
  if (!(gap_tol > 0.0)) throw std::invalid_argument("run_benders: gap_tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("run_benders: max_iters must be >= 1");
  {
    const ValidationReport rep = validate(prog);
    if (!rep.valid()) {
      std::string msg = "run_benders: program is invalid:";
      for (const auto& v : rep.violations) msg += "\n  " + v;
      throw ValidationError(msg);
    }
  }

  const FirstStageData& fs = prog.first_stage;
  const Index n1 = fs.n1(), m1 = fs.m1();
  const int S = prog.num_scenarios();

  BendersResult res;
  const double theta_cap = detail::benders_theta_cap(prog, opts, threads, res.warnings);

  double best = -std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  std::vector<double> q_values(static_cast<size_t>(S));
  std::vector<Vector> q_duals(static_cast<size_t>(S));

  for (int it = 1; it <= max_iters; ++it) {
    const Index rows = m1 + 1 + static_cast<Index>(res.cuts.size());
    LpProblem master;
    master.objective = Vector::Zero(n1 + 2);
    master.objective.head(n1) = fs.c;
    master.objective[n1] = 1.0;
    master.objective[n1 + 1] = -1.0;
    master.constraint_matrix = Matrix::Zero(rows, n1 + 2);
    master.constraint_matrix.topLeftCorner(m1, n1) = fs.A;
    master.constraint_matrix(m1, n1) = 1.0;
    master.constraint_matrix(m1, n1 + 1) = -1.0;
    master.rhs = Vector(rows);
    master.rhs.head(m1) = fs.b;
    master.rhs[m1] = theta_cap;
    for (size_t t = 0; t < res.cuts.size(); ++t) {
      const Index r = m1 + 1 + static_cast<Index>(t);
      master.constraint_matrix.row(r).head(n1) = -res.cuts[t].gradient.transpose();
      master.constraint_matrix(r, n1) = 1.0;
      master.constraint_matrix(r, n1 + 1) = -1.0;
      master.rhs[r] = res.cuts[t].intercept;
    }

    const LpSolution msol = solve_lp(master, opts);
    if (msol.status == LpStatus::Infeasible)
      throw ProblemInfeasible("run_benders: first-stage feasible set is empty");
    if (msol.status == LpStatus::Unbounded)
      throw MasterUnbounded("run_benders: master is unbounded despite the recourse cap");
    const double upper = msol.objective;
    const Vector x_t = msol.primal.head(n1);

    parallel_for(S, threads, [&](Index s) {
      const auto& sc = prog.scenarios[static_cast<size_t>(s)];
      const LpSolution sol = solve_lp(LpProblem{sc.q, sc.W, sc.h - sc.T * x_t}, opts);
      if (sol.status == LpStatus::Infeasible)
        throw RecourseInfeasible("run_benders: recourse infeasible at the master iterate (scenario " +
                                     std::to_string(s) + ")",
                                 static_cast<int>(s));
      if (sol.status == LpStatus::Unbounded)
        throw RecourseUnbounded("run_benders: recourse unbounded at the master iterate (scenario " +
                                    std::to_string(s) + ")",
                                static_cast<int>(s));
      q_values[static_cast<size_t>(s)] = sol.objective;
      q_duals[static_cast<size_t>(s)] = sol.duals;
    });

    double expected_q = 0.0;
    for (int s = 0; s < S; ++s)
      expected_q += prog.scenarios[static_cast<size_t>(s)].probability *
                    q_values[static_cast<size_t>(s)];
    const double incumbent = fs.c.dot(x_t) + expected_q;
    if (incumbent > best) {
      best = incumbent;
      res.x_best = x_t;
    }
    res.gap_history.emplace_back(upper, best);
    res.iterations = it;
    gap = (upper - best) / std::max(std::abs(upper), 1.0);
    if (gap <= gap_tol) {
      res.converged = true;
      break;
    }

    OptimalityCut cut;
    cut.gradient = Vector::Zero(n1);
    cut.intercept = 0.0;
    for (int s = 0; s < S; ++s) {
      const auto& sc = prog.scenarios[static_cast<size_t>(s)];
      cut.gradient.noalias() -= sc.probability * (sc.T.transpose() * q_duals[static_cast<size_t>(s)]);
      cut.intercept += sc.probability * q_duals[static_cast<size_t>(s)].dot(sc.h);
    }
    res.cuts.push_back(std::move(cut));
  }

  res.objective = best;
  res.final_gap = gap;
  return res;
}

}  // namespace stodec
