#pragma once

#include "stodec/ballstage.hpp"
#include "stodec/linprog.hpp"
#include "stodec/model.hpp"
#include "stodec/parallel.hpp"
#include "stodec/recourse.hpp"
#include "stodec/types.hpp"

#include <string>
#include <vector>

namespace stodec {

/**
 * Extensive form: one LP over (x, y_1, ..., y_S) with block layout
 *
 *   objective  ( c, P_1 q_1, ..., P_S q_S )
 *   rows       A x <= b
 *              T_s x + W_s y_s <= h_s        for s = 0..S-1 in index order
 *
 * x occupies the first n1 columns, scenario s the n2 columns starting at
 * n1 + s*n2; its rows start at m1 + s*m2.  The layout is part of the
 * contract so primal blocks unpack deterministically.
 */

struct ExtensiveSolution {
  double objective = 0.0;
  Vector x_star;
  std::vector<Vector> y_star;
  struct BuildStats {
    Index rows = 0;
    Index cols = 0;
  } build_stats;
  long lp_iterations = 0;
};

inline LpProblem build_extensive(const StochasticProgram& prog) {
  {
    const ValidationReport rep = validate(prog);
    if (!rep.valid()) {
      std::string msg = "build_extensive: program is invalid:";
      for (const auto& v : rep.violations) msg += "\n  " + v;
      throw ValidationError(msg);
    }
  }
  const Index m1 = prog.m1(), n1 = prog.n1(), m2 = prog.m2(), n2 = prog.n2();
  const Index S = prog.num_scenarios();
  const Index rows = m1 + S * m2;
  const Index cols = n1 + S * n2;

  LpProblem p;
  p.objective = Vector::Zero(cols);
  p.objective.head(n1) = prog.first_stage.c;
  p.constraint_matrix = Matrix::Zero(rows, cols);
  p.constraint_matrix.topLeftCorner(m1, n1) = prog.first_stage.A;
  p.rhs = Vector(rows);
  p.rhs.head(m1) = prog.first_stage.b;
  for (Index s = 0; s < S; ++s) {
    const auto& sc = prog.scenarios[static_cast<size_t>(s)];
    const Index r0 = m1 + s * m2, c0 = n1 + s * n2;
    p.objective.segment(c0, n2) = sc.probability * sc.q;
    p.constraint_matrix.block(r0, 0, m2, n1) = sc.T;
    p.constraint_matrix.block(r0, c0, m2, n2) = sc.W;
    p.rhs.segment(r0, m2) = sc.h;
  }
  return p;
}

inline ExtensiveSolution solve_extensive(const StochasticProgram& prog,
                                         const SolverOptions& opts = {}) {
  const LpProblem p = build_extensive(prog);
  const LpSolution sol = solve_lp(p, opts);
  if (sol.status == LpStatus::Infeasible)
    throw ProblemInfeasible("solve_extensive: extensive form is infeasible");
  if (sol.status == LpStatus::Unbounded)
    throw ProblemUnbounded("solve_extensive: extensive form is unbounded");

  const Index n1 = prog.n1(), n2 = prog.n2();
  ExtensiveSolution out;
  out.objective = sol.objective;
  out.x_star = sol.primal.head(n1);
  out.y_star.reserve(prog.scenarios.size());
  for (Index s = 0; s < prog.num_scenarios(); ++s)
    out.y_star.push_back(sol.primal.segment(n1 + s * n2, n2));
  out.build_stats = {p.rows(), p.cols()};
  out.lp_iterations = sol.iterations;
  return out;
}

/// Naive decoupling: fix x to the first-stage-only optimum, then price the
/// recourse at that x.  Returns <c, x~> + sum_s P(s) Q(x~, s).
inline double run_naive(const StochasticProgram& prog, const SolverOptions& opts = {},
                        int threads = 0) {
  {
    const ValidationReport rep = validate(prog);
    if (!rep.valid()) {
      std::string msg = "run_naive: program is invalid:";
      for (const auto& v : rep.violations) msg += "\n  " + v;
      throw ValidationError(msg);
    }
  }
  const BallStageSolution stage1 = solve_unconstrained_stage1(prog.first_stage, opts);
  const int S = prog.num_scenarios();
  std::vector<double> values(static_cast<size_t>(S));
  parallel_for(S, threads, [&](Index s) {
    const auto& sc = prog.scenarios[static_cast<size_t>(s)];
    try {
      values[static_cast<size_t>(s)] = solve_recourse_fixed_x(sc, stage1.x_tau, opts);
    } catch (const RecourseInfeasible& err) {
      throw RecourseInfeasible(std::string(err.what()) + " (scenario " +
                                   std::to_string(s) + ", naive first stage)",
                               static_cast<int>(s));
    } catch (const RecourseUnbounded& err) {
      throw RecourseUnbounded(std::string(err.what()) + " (scenario " +
                                  std::to_string(s) + ", naive first stage)",
                              static_cast<int>(s));
    }
  });
  double total = stage1.objective;
  for (int s = 0; s < S; ++s)
    total += prog.scenarios[static_cast<size_t>(s)].probability *
             values[static_cast<size_t>(s)];
  return total;
}

}  // namespace stodec
