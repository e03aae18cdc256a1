#pragma once

#include "stodec/linprog.hpp"
#include "stodec/model.hpp"
#include "stodec/parallel.hpp"
#include "stodec/types.hpp"

#include <string>
#include <vector>

namespace stodec {

/// Q(x, s): optimum of  maximize <q, y>  s.t.  W y <= h - T x,  y >= 0.
/// Throws RecourseInfeasible / RecourseUnbounded (scenario index unknown at
/// this level; callers with context re-tag).
inline double solve_recourse_fixed_x(const Scenario& sc, const Vector& x,
                                     const SolverOptions& opts = {}) {
  if (x.size() != sc.T.cols())
    throw std::invalid_argument("solve_recourse_fixed_x: x has " +
                                std::to_string(x.size()) + " entries, expected " +
                                std::to_string(sc.T.cols()));
  const LpSolution sol = solve_lp(LpProblem{sc.q, sc.W, sc.h - sc.T * x}, opts);
  if (sol.status == LpStatus::Infeasible)
    throw RecourseInfeasible("recourse problem infeasible at the given first stage");
  if (sol.status == LpStatus::Unbounded)
    throw RecourseUnbounded("recourse problem unbounded at the given first stage");
  return sol.objective;
}

/// Fixed-norm recourse: the first stage enters only through its norm, as the
/// axis point rho * e1, so the right-hand side is h - col1(T) * rho.
/// Definitionally identical to solve_recourse_fixed_x(sc, rho * e1).
inline double solve_recourse_fixed_norm(const Scenario& sc, double rho,
                                        const SolverOptions& opts = {}) {
  if (!(rho >= 0.0))
    throw std::invalid_argument("solve_recourse_fixed_norm: rho must be >= 0");
  Vector x = Vector::Zero(sc.T.cols());
  if (x.size() > 0) x[0] = rho;
  return solve_recourse_fixed_x(sc, x, opts);
}

/// Probability-weighted sum of fixed-norm recourse values, accumulated in
/// scenario-index order.  Recourse errors are re-tagged with the offending
/// scenario index.  Scenario solves run in parallel when threads permit.
inline double expected_recourse_fixed_norm(const StochasticProgram& prog, double rho,
                                           const SolverOptions& opts = {},
                                           int threads = 0) {
  const int count = prog.num_scenarios();
  std::vector<double> values(static_cast<size_t>(count), 0.0);
  parallel_for(count, threads, [&](Index s) {
    const auto& sc = prog.scenarios[static_cast<size_t>(s)];
    try {
      values[static_cast<size_t>(s)] = solve_recourse_fixed_norm(sc, rho, opts);
    } catch (const RecourseInfeasible& err) {
      throw RecourseInfeasible(std::string(err.what()) + " (scenario " +
                                   std::to_string(s) + ")",
                               static_cast<int>(s));
    } catch (const RecourseUnbounded& err) {
      throw RecourseUnbounded(std::string(err.what()) + " (scenario " +
                                  std::to_string(s) + ")",
                              static_cast<int>(s));
    }
  });
  double total = 0.0;
  for (int s = 0; s < count; ++s)
    total += prog.scenarios[static_cast<size_t>(s)].probability *
             values[static_cast<size_t>(s)];
  return total;
}

}  // namespace stodec
