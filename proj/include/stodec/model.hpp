#pragma once

#include "stodec/linprog.hpp"
#include "stodec/rng.hpp"
#include "stodec/types.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

namespace stodec {

/**
 * Two-stage stochastic program with a finite scenario set:
 *
 *   maximize  <c, x> + sum_s P(s) * Q(x, s)
 *   s.t.      A x <= b,  x >= 0,
 *
 * where Q(x, s) is the optimum of the scenario recourse problem
 *
 *   maximize  <q_s, y>   s.t.  W_s y <= h_s - T_s x,  y >= 0.
 *
 * Scenario order is part of a program's identity: every aggregation in the
 * toolkit (expectations, cuts, reports) runs in index order so results are
 * reproducible.
 */

struct FirstStageData {
  Matrix A;
  Vector b;
  Vector c;

  Index m1() const { return A.rows(); }
  Index n1() const { return A.cols(); }
};

struct Scenario {
  Matrix T;
  Matrix W;
  Vector h;
  Vector q;
  double probability = 0.0;

  Index m2() const { return W.rows(); }
  Index n2() const { return W.cols(); }
};

struct StochasticProgram {
  FirstStageData first_stage;
  std::vector<Scenario> scenarios;

  Index m1() const { return first_stage.m1(); }
  Index n1() const { return first_stage.n1(); }
  Index m2() const { return scenarios.empty() ? 0 : scenarios.front().m2(); }
  Index n2() const { return scenarios.empty() ? 0 : scenarios.front().n2(); }
  int num_scenarios() const { return static_cast<int>(scenarios.size()); }
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool valid() const { return violations.empty(); }
};

namespace detail {
inline std::string short_real(double v) {
  std::ostringstream oss;
  oss << v;
  return oss.str();
}
}  // namespace detail

/// Lists every invariant violation; an empty report means the program is
/// well formed. Never throws.
inline ValidationReport validate(const StochasticProgram& prog) {
  ValidationReport rep;
  const auto& fs = prog.first_stage;
  if (fs.b.size() != fs.m1())
    rep.violations.push_back("b has " + std::to_string(fs.b.size()) +
                             " entries, expected " + std::to_string(fs.m1()));
  if (fs.c.size() != fs.n1())
    rep.violations.push_back("c has " + std::to_string(fs.c.size()) +
                             " entries, expected " + std::to_string(fs.n1()));
  if (!fs.A.allFinite()) rep.violations.push_back("A contains non-finite entries");
  if (!fs.b.allFinite()) rep.violations.push_back("b contains non-finite entries");
  if (!fs.c.allFinite()) rep.violations.push_back("c contains non-finite entries");

  const Index m2 = prog.m2(), n2 = prog.n2();
  double prob_sum = 0.0;
  for (size_t s = 0; s < prog.scenarios.size(); ++s) {
    const auto& sc = prog.scenarios[s];
    const std::string tag = "scenario " + std::to_string(s) + ": ";
    if (sc.m2() != m2 || sc.n2() != n2)
      rep.violations.push_back(tag + "recourse dimensions (" +
                               std::to_string(sc.m2()) + ", " + std::to_string(sc.n2()) +
                               ") differ from scenario 0 (" + std::to_string(m2) +
                               ", " + std::to_string(n2) + ")");
    if (sc.T.rows() != sc.m2() || sc.T.cols() != fs.n1())
      rep.violations.push_back(tag + "T is " + std::to_string(sc.T.rows()) + "x" +
                               std::to_string(sc.T.cols()) + ", expected " +
                               std::to_string(sc.m2()) + "x" + std::to_string(fs.n1()));
    if (sc.h.size() != sc.m2())
      rep.violations.push_back(tag + "h has " + std::to_string(sc.h.size()) +
                               " entries, expected " + std::to_string(sc.m2()));
    if (sc.q.size() != sc.n2())
      rep.violations.push_back(tag + "q has " + std::to_string(sc.q.size()) +
                               " entries, expected " + std::to_string(sc.n2()));
    if (!sc.T.allFinite() || !sc.W.allFinite() || !sc.h.allFinite() || !sc.q.allFinite())
      rep.violations.push_back(tag + "contains non-finite entries");
    if (sc.probability < 0.0)
      rep.violations.push_back(tag + "probability is negative");
    if (!std::isfinite(sc.probability))
      rep.violations.push_back(tag + "probability is non-finite");
    else
      prob_sum += sc.probability;
  }
  if (std::abs(prob_sum - 1.0) > 1e-12)
    rep.violations.push_back("probabilities sum to " + detail::short_real(prob_sum));
  return rep;
}

struct GeneratorConfig {
  Index m1 = 100;
  Index n1 = 5;
  Index m2 = 100;
  Index n2 = 5;
  double h_magnitude = 2.0;
  int num_scenarios = 50;
  std::uint64_t seed = 0;
};

/**
 * Gaussian benchmark instance, fully determined by the seed:
 *
 *   stream 0      -> A   (m1 x n1, standard normal entries)
 *   stream 1      -> c   (n1 draws, rescaled to ||c||_2 = 0.5)
 *   stream 2      -> q   (n2 draws, rescaled to ||q||_2 = 1; shared by all
 *                         scenarios)
 *   stream 3+2s   -> T_s (m2 x n1, standard normal)
 *   stream 4+2s   -> W_s (m2 x n2, standard normal)
 *
 * Matrices fill row by row.  b is all ones, every h_s is the constant vector
 * h_magnitude * 1, and probabilities are uniform 1/num_scenarios.  No
 * screening is applied: a draw may violate recourse feasibility, and callers
 * that need clean instances detect that at solve time and resample.
 */
inline StochasticProgram generate_gaussian_instance(const GeneratorConfig& cfg) {
  if (cfg.m1 < 1 || cfg.n1 < 1 || cfg.m2 < 1 || cfg.n2 < 1 || cfg.num_scenarios < 1)
    throw std::invalid_argument("generate_gaussian_instance: all counts must be >= 1");

  StochasticProgram prog;
  prog.first_stage.A.resize(cfg.m1, cfg.n1);
  {
    SubstreamRng rng(cfg.seed, 0);
    rng.fill_gaussian(prog.first_stage.A);
  }
  prog.first_stage.b = Vector::Ones(cfg.m1);
  prog.first_stage.c.resize(cfg.n1);
  {
    SubstreamRng rng(cfg.seed, 1);
    rng.fill_gaussian(prog.first_stage.c);
    prog.first_stage.c *= 0.5 / prog.first_stage.c.norm();
  }
  Vector q(cfg.n2);
  {
    SubstreamRng rng(cfg.seed, 2);
    rng.fill_gaussian(q);
    q /= q.norm();
  }

  prog.scenarios.resize(static_cast<size_t>(cfg.num_scenarios));
  const double prob = 1.0 / cfg.num_scenarios;
  for (int s = 0; s < cfg.num_scenarios; ++s) {
    auto& sc = prog.scenarios[static_cast<size_t>(s)];
    sc.T.resize(cfg.m2, cfg.n1);
    {
      SubstreamRng rng(cfg.seed, 3 + 2 * static_cast<std::uint64_t>(s));
      rng.fill_gaussian(sc.T);
    }
    sc.W.resize(cfg.m2, cfg.n2);
    {
      SubstreamRng rng(cfg.seed, 4 + 2 * static_cast<std::uint64_t>(s));
      rng.fill_gaussian(sc.W);
    }
    sc.h = Vector::Constant(cfg.m2, cfg.h_magnitude);
    sc.q = q;
    sc.probability = prob;
  }
  return prog;
}

/**
 * Upper bound on ||x||_2 over {x >= 0 : Ax <= b}, computed as the norm of
 * the componentwise-maxima vector (one LP per coordinate).  This over-bounds
 * the true maximum norm, which is all the radius sweep needs.
 *
 * Throws ProblemUnbounded naming the runaway coordinate if any coordinate LP
 * is unbounded, and ProblemInfeasible if the feasible set is empty.
 */
inline double max_feasible_norm(const FirstStageData& fs, const SolverOptions& opts = {}) {
  const Index n = fs.n1();
  Vector maxima(n);
  LpProblem p{Vector::Zero(n), fs.A, fs.b};
  for (Index j = 0; j < n; ++j) {
    p.objective.setZero();
    p.objective[j] = 1.0;
    const LpSolution sol = solve_lp(p, opts);
    if (sol.status == LpStatus::Unbounded)
      throw ProblemUnbounded("max_feasible_norm: coordinate " + std::to_string(j) +
                                 " is unbounded over the first-stage set",
                             static_cast<int>(j));
    if (sol.status == LpStatus::Infeasible)
      throw ProblemInfeasible("max_feasible_norm: first-stage set is empty");
    maxima[j] = std::max(sol.objective, 0.0);
  }
  return maxima.norm();
}

}  // namespace stodec
