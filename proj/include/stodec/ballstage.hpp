#pragma once

#include "stodec/linprog.hpp"
#include "stodec/model.hpp"
#include "stodec/rng.hpp"
#include "stodec/types.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace stodec {

/**
 * Norm-capped first stage:
 *
 *   maximize  <c, x>   s.t.  A x <= b,  ||x||_2 <= tau,  x >= 0.
 *
 * The Euclidean ball is handled by outer approximation: solve the LP
 * relaxation, and while the incumbent x_k sticks out of the ball add the
 * valid cut <x_k / ||x_k||, x> <= tau (tight at the projection of x_k) and
 * re-solve.  Each cut is supported by the ball, so the approximating
 * polytope always contains the true feasible set and the final objective is
 * an optimum of the capped problem up to ball_tol.
 */

struct BallStageOptions {
  SolverOptions lp;
  /// Relative ball violation below which the incumbent counts as inside.
  double ball_tol = 1e-7;
  int max_cuts = 500;
  /// Optional deterministic tie-break: perturbs the objective by a seeded
  /// direction of magnitude 1e-7 * ||c||_2.  Reported objectives always use
  /// the unperturbed c.
  bool perturb_objective = false;
  std::uint64_t perturb_seed = 0;
  /// Unit ball-cut normals from earlier solves to preload.  The cuts live in
  /// u = x / tau coordinates, so they are valid at every radius.  Preloaded
  /// cuts are not reported in cut_normals and do not count against max_cuts.
  const std::vector<Vector>* seed_cuts = nullptr;
};

struct BallStageSolution {
  Vector x_tau;
  double objective = 0.0;
  double norm = 0.0;
  double tau = 0.0;
  int cuts_used = 0;
  /// Unit outward normals of the accumulated cuts, in generation order.
  std::vector<Vector> cut_normals;
};

namespace detail {

inline Vector effective_objective(const FirstStageData& fs, const BallStageOptions& opts) {
  if (!opts.perturb_objective) return fs.c;
  SubstreamRng rng(opts.perturb_seed, 0);
  Vector dir(fs.n1());
  rng.fill_gaussian(dir);
  const double len = dir.norm();
  if (len == 0.0) return fs.c;
  return fs.c + (1e-7 * fs.c.norm() / len) * dir;
}

}  // namespace detail

/// First-stage problem without the norm cap (one LP).  The returned tau is
/// the +infinity sentinel.  Throws ProblemInfeasible / ProblemUnbounded.
inline BallStageSolution solve_unconstrained_stage1(const FirstStageData& fs,
                                                    const SolverOptions& opts = {}) {
  const LpSolution sol = solve_lp(LpProblem{fs.c, fs.A, fs.b}, opts);
  if (sol.status == LpStatus::Infeasible)
    throw ProblemInfeasible("stage 1: feasible set is empty");
  if (sol.status == LpStatus::Unbounded)
    throw ProblemUnbounded("stage 1: objective is unbounded over the feasible set");
  BallStageSolution out;
  out.x_tau = sol.primal;
  out.objective = sol.objective;
  out.norm = out.x_tau.norm();
  out.tau = std::numeric_limits<double>::infinity();
  return out;
}

inline BallStageSolution solve_ball_constrained(const FirstStageData& fs, double tau,
                                                const BallStageOptions& opts = {}) {
  if (!(tau >= 0.0))
    throw std::invalid_argument("solve_ball_constrained: tau must be >= 0");
  const Index m = fs.m1(), n = fs.n1();

  if (tau == 0.0) {
    // The ball degenerates to the origin; only feasibility is at stake.
    if (m > 0 && fs.b.minCoeff() < -opts.lp.feas_tol * (1.0 + fs.b.cwiseAbs().maxCoeff()))
      throw ProblemInfeasible("ball stage: x = 0 violates Ax <= b and tau = 0 allows no other point");
    BallStageSolution out;
    out.x_tau = Vector::Zero(n);
    out.tau = 0.0;
    return out;
  }

  static const std::vector<Vector> kNoSeeds;
  const std::vector<Vector>& seeds = opts.seed_cuts != nullptr ? *opts.seed_cuts : kNoSeeds;
  for (const auto& v : seeds)
    if (v.size() != n)
      throw std::invalid_argument("solve_ball_constrained: seed cut dimension mismatch");

  const Vector c_eff = detail::effective_objective(fs, opts);
  BallStageSolution out;
  out.tau = tau;

  // Work in u = x / tau so the ball is the unit ball regardless of tau;
  // otherwise a small radius pushes the cut depth at termination,
  // tau * ball_tol, below the LP feasibility tolerance and the loop stalls.
  // Cuts and the termination test are the same ones expressed in u.
  //
  // Each polytope row's rhs b_i / tau is clamped at a few times the row norm.
  // No point of the unit ball can reach the cap, so every ball point stays
  // feasible and any returned point still satisfies the original rows; without
  // the clamp a small tau mixes O(1/tau) and O(1) rows in one LP and the
  // certificate tolerances degrade.
  Vector polytope_rhs(m);
  for (Index i = 0; i < m; ++i)
    polytope_rhs[i] = std::min(fs.b[i] / tau, 4.0 * (1.0 + fs.A.row(i).norm()));

  LpProblem p;
  p.objective = c_eff;
  const auto assemble = [&]() {
    const Index extra = static_cast<Index>(seeds.size() + out.cut_normals.size());
    Matrix g(m + extra, n);
    g.topRows(m) = fs.A;
    Index r = m;
    for (const auto& v : seeds) g.row(r++) = v.transpose();
    for (const auto& v : out.cut_normals) g.row(r++) = v.transpose();
    Vector rhs(m + extra);
    rhs.head(m) = polytope_rhs;
    rhs.tail(extra).setOnes();
    p.constraint_matrix = std::move(g);
    p.rhs = std::move(rhs);
  };
  assemble();
  while (true) {
    const LpSolution sol = solve_lp(p, opts.lp);
    if (sol.status == LpStatus::Infeasible) {
      // Either the polytope itself is empty or it misses the tau-ball; a
      // zero-objective probe on the original scaling tells the two apart.
      const LpSolution probe =
          solve_lp(LpProblem{Vector::Zero(n), fs.A, fs.b}, opts.lp);
      throw ProblemInfeasible(
          probe.status == LpStatus::Infeasible
              ? "ball stage: feasible set is empty"
              : "ball stage: no feasible point within radius " + std::to_string(tau));
    }
    if (sol.status == LpStatus::Unbounded)
      throw ProblemUnbounded("ball stage: LP relaxation is unbounded (first stage not bounded)");

    const double norm = sol.primal.norm();
    if (norm <= 1.0 + opts.ball_tol) {
      out.x_tau = tau * sol.primal;
      out.objective = fs.c.dot(out.x_tau);
      out.norm = out.x_tau.norm();
      out.cuts_used = static_cast<int>(out.cut_normals.size());
      return out;
    }
    if (static_cast<int>(out.cut_normals.size()) >= opts.max_cuts)
      throw MaxCutsExceeded("ball stage: exceeded " + std::to_string(opts.max_cuts) +
                            " cuts at tau = " + std::to_string(tau));

    out.cut_normals.push_back(sol.primal / norm);
    assemble();
  }
}

}  // namespace stodec
