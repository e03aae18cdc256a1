#pragma once

#include "stodec/types.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace stodec {

/**
 * Canonical-form linear programming:
 *
 *   maximize    <objective, x>
 *   subject to  constraint_matrix * x <= rhs,   x >= 0.
 *
 * solve_lp classifies every instance as Optimal, Infeasible, or Unbounded;
 * the latter two are ordinary results, not errors.  Optimal solutions carry
 * a dual vector and are certified against verify_solution before they are
 * returned, so downstream code can rely on the reported status.
 *
 * The implementation is a two-phase revised simplex.  The basis inverse is
 * kept as an LU factorization (dense for small bases, sparse above that)
 * composed with a product-form eta file that is periodically flushed by
 * refactorization.  Entering variables are picked by Dantzig pricing with a
 * switch to Bland's rule after a run of degenerate pivots, which is what
 * makes termination safe on degenerate instances.
 *
 * Tall problems (rows >> columns) are solved through their dual, which has
 * the small basis; the optimal primal point is read off the dual multipliers.
 * `SolverOptions::orientation` can force either route.
 */

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct SolverOptions {
  enum class Orientation { Auto, Primal, Dual };

  /// Feasibility tolerance, applied relative to the row scale.
  double feas_tol = 1e-9;
  /// Objective agreement tolerance for the primal/dual certificate.
  double obj_tol = 1e-7;
  /// Entries at or below this magnitude are never accepted as pivots.
  double pivot_tol = 1e-10;
  /// Total pivot budget; 0 selects 50*(rows+cols) + 2000.
  long max_iterations = 0;
  /// Eta-file length between refactorizations.
  int refactor_interval = 100;
  Orientation orientation = Orientation::Auto;
};

struct LpProblem {
  Vector objective;
  Matrix constraint_matrix;
  Vector rhs;

  Index rows() const { return constraint_matrix.rows(); }
  Index cols() const { return constraint_matrix.cols(); }

  void validate() const {
    if (constraint_matrix.rows() != rhs.size())
      throw std::invalid_argument("LpProblem: rhs length does not match row count");
    if (constraint_matrix.cols() != objective.size())
      throw std::invalid_argument("LpProblem: objective length does not match column count");
    if (!objective.allFinite() || !rhs.allFinite() || !constraint_matrix.allFinite())
      throw std::invalid_argument("LpProblem: data contains non-finite entries");
  }
};

struct LpSolution {
  LpStatus status = LpStatus::Optimal;
  Vector primal;
  Vector duals;
  double objective = std::numeric_limits<double>::quiet_NaN();
  long iterations = 0;
};

struct VerificationReport {
  double max_primal_infeasibility = 0.0;
  double max_dual_infeasibility = 0.0;
  double duality_gap = 0.0;
  double complementarity_violation = 0.0;
  bool pass = false;
};

/// Checks the Optimal certificate: primal feasibility, dual feasibility,
/// objective agreement, and complementary slackness, each at the tolerance
/// scales documented in SolverOptions.
inline VerificationReport verify_solution(const LpProblem& p, const LpSolution& sol,
                                          const SolverOptions& opts = {}) {
  VerificationReport rep;
  if (sol.status != LpStatus::Optimal) return rep;
  const Index m = p.rows(), n = p.cols();
  if (sol.primal.size() != n || sol.duals.size() != m) return rep;

  const double row_scale = m > 0 ? 1.0 + p.rhs.cwiseAbs().maxCoeff() : 1.0;
  const double col_scale = n > 0 ? 1.0 + p.objective.cwiseAbs().maxCoeff() : 1.0;

  double pinf = 0.0;
  if (m > 0) {
    const Vector slack = p.rhs - p.constraint_matrix * sol.primal;
    pinf = std::max(0.0, -slack.minCoeff());
    rep.complementarity_violation =
        m > 0 ? (sol.duals.array() * slack.array()).abs().maxCoeff() : 0.0;
  }
  if (n > 0) pinf = std::max(pinf, std::max(0.0, -sol.primal.minCoeff()));
  rep.max_primal_infeasibility = pinf;

  double dinf = 0.0;
  if (n > 0) {
    const Vector reduced = p.objective - p.constraint_matrix.transpose() * sol.duals;
    dinf = std::max(0.0, reduced.maxCoeff());
    rep.complementarity_violation =
        std::max(rep.complementarity_violation,
                 (sol.primal.array() * reduced.array()).abs().maxCoeff());
  }
  if (m > 0) dinf = std::max(dinf, std::max(0.0, -sol.duals.minCoeff()));
  rep.max_dual_infeasibility = dinf;

  const double primal_obj = n > 0 ? p.objective.dot(sol.primal) : 0.0;
  const double dual_obj = m > 0 ? p.rhs.dot(sol.duals) : 0.0;
  rep.duality_gap = std::abs(primal_obj - dual_obj);

  const double obj_scale = 1.0 + std::abs(primal_obj);
  rep.pass = rep.max_primal_infeasibility <= opts.feas_tol * row_scale &&
             rep.max_dual_infeasibility <= opts.feas_tol * col_scale &&
             rep.duality_gap <= opts.obj_tol * obj_scale &&
             rep.complementarity_violation <= opts.obj_tol * obj_scale;
  return rep;
}

namespace detail {

/// LU factorization of the current basis plus a product-form eta file.
/// Dense backend below `kDenseLimit` rows, SparseLU above.
class BasisFactor {
 public:
  static constexpr Index kDenseLimit = 400;

  /// basis[i] < n: structural column i of `a`; [n, n+m): slack +e;
  /// [n+m, n+2m): artificial -e.
  void rebuild(const Eigen::SparseMatrix<double>& a, const std::vector<int>& basis,
               Index n) {
    const Index m = static_cast<Index>(basis.size());
    etas_.clear();
    dense_ = m <= kDenseLimit;
    if (dense_) {
      Matrix b = Matrix::Zero(m, m);
      for (Index i = 0; i < m; ++i) {
        const int var = basis[static_cast<size_t>(i)];
        if (var < n) {
          for (Eigen::SparseMatrix<double>::InnerIterator it(a, var); it; ++it)
            b(it.row(), i) = it.value();
        } else if (var < n + m) {
          b(var - n, i) = 1.0;
        } else {
          b(var - n - m, i) = -1.0;
        }
      }
      dense_lu_.compute(b);
      const auto diag = dense_lu_.matrixLU().diagonal().cwiseAbs();
      singular_ = diag.minCoeff() <= 1e-13 * (1.0 + diag.maxCoeff());
    } else {
      std::vector<Eigen::Triplet<double>> trips;
      trips.reserve(static_cast<size_t>(a.nonZeros() / std::max<Index>(a.cols(), 1) + 2) *
                    static_cast<size_t>(m));
      for (Index i = 0; i < m; ++i) {
        const int var = basis[static_cast<size_t>(i)];
        if (var < n) {
          for (Eigen::SparseMatrix<double>::InnerIterator it(a, var); it; ++it)
            trips.emplace_back(it.row(), i, it.value());
        } else if (var < n + m) {
          trips.emplace_back(var - n, i, 1.0);
        } else {
          trips.emplace_back(var - n - m, i, -1.0);
        }
      }
      Eigen::SparseMatrix<double> b(m, m);
      b.setFromTriplets(trips.begin(), trips.end());
      sparse_lu_.compute(b);
      singular_ = sparse_lu_.info() != Eigen::Success;
    }
  }

  bool singular() const { return singular_; }
  int eta_count() const { return static_cast<int>(etas_.size()); }

  void push_eta(Index row, Vector alpha) {
    etas_.emplace_back(row, std::move(alpha));
  }

  /// B^{-1} v.
  Vector ftran(const Vector& v) const {
    Vector x = dense_ ? dense_lu_.solve(v).eval() : sparse_lu_.solve(v).eval();
    for (const auto& [r, alpha] : etas_) {
      const double t = x[r] / alpha[r];
      x -= t * alpha;
      x[r] = t;
    }
    return x;
  }

  /// B^{-T} v.
  Vector btran(const Vector& v) const {
    Vector z = v;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      const auto& [r, alpha] = *it;
      z[r] -= (alpha.dot(z) - z[r]) / alpha[r];
    }
    return dense_ ? dense_lu_.transpose().solve(z).eval()
                  : sparse_lu_.transpose().solve(z).eval();
  }

 private:
  bool dense_ = true;
  bool singular_ = false;
  Eigen::PartialPivLU<Matrix> dense_lu_;
  // mutable: SparseLU::transpose() is non-const in Eigen 3.4
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>> sparse_lu_;
  std::vector<std::pair<Index, Vector>> etas_;
};

struct CoreResult {
  LpStatus status = LpStatus::Optimal;
  Vector x;
  Vector y;
  double objective = std::numeric_limits<double>::quiet_NaN();
  long iterations = 0;
};

/// Two-phase revised simplex over one fixed orientation.  Variable ids:
/// [0, n) structural, [n, n+m) slack, [n+m, n+2m) artificial.
class SimplexCore {
 public:
  SimplexCore(Eigen::SparseMatrix<double> structural, Vector cost, Vector rhs,
              const SolverOptions& opts)
      : a_(std::move(structural)),
        cost_(std::move(cost)),
        rhs_(std::move(rhs)),
        opts_(opts),
        m_(a_.rows()),
        n_(a_.cols()) {
    max_iterations_ = opts_.max_iterations > 0 ? opts_.max_iterations
                                               : 50 * (m_ + n_) + 2000;
    const double rhs_scale = m_ > 0 ? 1.0 + rhs_.cwiseAbs().maxCoeff() : 1.0;
    feas_eps_ = opts_.feas_tol * rhs_scale;
    degen_eps_ = 1e-11 * rhs_scale;
    cost_scale_ = n_ > 0 ? 1.0 + cost_.cwiseAbs().maxCoeff() : 1.0;
  }

  CoreResult run() { return run_impl(false); }

  /// Phase 1 only: true iff {x >= 0 : Ax <= b} is nonempty.
  bool feasible() { return run_impl(true).status == LpStatus::Optimal; }

 private:
  enum class StepOutcome { Converged, Unbounded };

  CoreResult run_impl(bool feasibility_only) {
    setup();
    CoreResult res;
    if (needs_phase_one_) {
      phase_one_ = true;
      if (iterate() == StepOutcome::Unbounded)
        throw NumericalFailure("simplex: phase 1 objective reported unbounded");
      double residual = 0.0;
      for (Index i = 0; i < m_; ++i)
        if (basis_[static_cast<size_t>(i)] >= n_ + m_)
          residual += std::max(xb_[i], 0.0);
      if (residual > feas_eps_) {
        res.status = LpStatus::Infeasible;
        res.iterations = iterations_;
        return res;
      }
      if (feasibility_only) {
        res.iterations = iterations_;
        return res;
      }
      pivot_out_artificials();
    } else if (feasibility_only) {
      res.iterations = iterations_;
      return res;
    }

    phase_one_ = false;
    if (iterate() == StepOutcome::Unbounded) {
      res.status = LpStatus::Unbounded;
      res.iterations = iterations_;
      return res;
    }

    refactor();
    res.status = LpStatus::Optimal;
    res.x = Vector::Zero(n_);
    for (Index i = 0; i < m_; ++i) {
      const int var = basis_[static_cast<size_t>(i)];
      if (var < n_) res.x[var] = xb_[i];
    }
    res.y = factor_.btran(basis_costs());
    res.objective = n_ > 0 ? cost_.dot(res.x) : 0.0;
    res.iterations = iterations_;
    return res;
  }

  void setup() {
    basis_.assign(static_cast<size_t>(m_), 0);
    in_basis_.assign(static_cast<size_t>(n_ + 2 * m_), 0);
    xb_ = Vector::Zero(m_);
    needs_phase_one_ = false;
    for (Index i = 0; i < m_; ++i) {
      if (rhs_[i] < 0.0) {
        basis_[static_cast<size_t>(i)] = static_cast<int>(n_ + m_ + i);
        xb_[i] = -rhs_[i];
        needs_phase_one_ = true;
      } else {
        basis_[static_cast<size_t>(i)] = static_cast<int>(n_ + i);
        xb_[i] = rhs_[i];
      }
      in_basis_[static_cast<size_t>(basis_[static_cast<size_t>(i)])] = 1;
    }
    iterations_ = 0;
    stall_ = 0;
    bland_ = false;
    refactor();
  }

  Vector basis_costs() const {
    Vector cb = Vector::Zero(m_);
    for (Index i = 0; i < m_; ++i) {
      const int var = basis_[static_cast<size_t>(i)];
      if (phase_one_) {
        if (var >= n_ + m_) cb[i] = -1.0;
      } else if (var < n_) {
        cb[i] = cost_[var];
      }
    }
    return cb;
  }

  void refactor() {
    factor_.rebuild(a_, basis_, n_);
    if (factor_.singular())
      throw NumericalFailure("simplex: singular basis at refactorization");
    xb_ = factor_.ftran(rhs_);
  }

  Vector column(int var) const {
    Vector col = Vector::Zero(m_);
    if (var < n_) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(a_, var); it; ++it)
        col[it.row()] = it.value();
    } else if (var < n_ + m_) {
      col[var - n_] = 1.0;
    } else {
      col[var - n_ - m_] = -1.0;
    }
    return col;
  }

  /// Entering variable id, or -1 at optimality.  Artificials never re-enter.
  int price(const Vector& y) const {
    const double dtol =
        opts_.feas_tol * (phase_one_ ? 2.0 : cost_scale_);
    Vector d(n_);
    if (n_ > 0) {
      d.noalias() = -(a_.transpose() * y);
      if (!phase_one_) d += cost_;
    }
    if (bland_) {
      for (Index j = 0; j < n_; ++j)
        if (!in_basis_[static_cast<size_t>(j)] && d[j] > dtol)
          return static_cast<int>(j);
      for (Index i = 0; i < m_; ++i)
        if (!in_basis_[static_cast<size_t>(n_ + i)] && -y[i] > dtol)
          return static_cast<int>(n_ + i);
      return -1;
    }
    int best = -1;
    double best_d = dtol;
    for (Index j = 0; j < n_; ++j)
      if (!in_basis_[static_cast<size_t>(j)] && d[j] > best_d) {
        best_d = d[j];
        best = static_cast<int>(j);
      }
    for (Index i = 0; i < m_; ++i)
      if (!in_basis_[static_cast<size_t>(n_ + i)] && -y[i] > best_d) {
        best_d = -y[i];
        best = static_cast<int>(n_ + i);
      }
    return best;
  }

  /// Leaving row for the entering direction, or -1 if no entry blocks.
  /// Basic artificials resting at zero additionally block any step that
  /// would lift them off zero; positive artificials (phase 1) may rise.
  Index ratio_test(const Vector& alpha) const {
    Index r = -1;
    double theta = std::numeric_limits<double>::infinity();
    double best_mag = 0.0;
    for (Index i = 0; i < m_; ++i) {
      const double a = alpha[i];
      const bool artificial = basis_[static_cast<size_t>(i)] >= n_ + m_;
      double ratio;
      double mag;
      if (a > opts_.pivot_tol) {
        ratio = std::max(xb_[i], 0.0) / a;
        mag = a;
      } else if (artificial && a < -opts_.pivot_tol && xb_[i] <= degen_eps_) {
        ratio = 0.0;
        mag = -a;
      } else {
        continue;
      }
      const double tie = 1e-10 * (1.0 + theta);
      if (r < 0 || ratio < theta - tie) {
        r = i;
        theta = ratio;
        best_mag = mag;
      } else if (ratio <= theta + tie) {
        const bool take =
            bland_ ? basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(r)]
                   : mag > best_mag;
        if (take) {
          r = i;
          theta = std::min(theta, ratio);
          best_mag = mag;
        }
      }
    }
    return r;
  }

  StepOutcome iterate() {
    while (true) {
      if (iterations_ >= max_iterations_)
        throw NumericalFailure("simplex: iteration limit of " +
                               std::to_string(max_iterations_) + " pivots exceeded");
      if (factor_.eta_count() >= opts_.refactor_interval) refactor();

      const Vector y = factor_.btran(basis_costs());
      const int q = price(y);
      if (q < 0) return StepOutcome::Converged;

      const Vector alpha = factor_.ftran(column(q));
      const Index r = ratio_test(alpha);
      if (r < 0) {
        if (phase_one_)
          throw NumericalFailure("simplex: unbounded direction in phase 1");
        return StepOutcome::Unbounded;
      }
      pivot(q, r, alpha);
    }
  }

  void pivot(int q, Index r, const Vector& alpha) {
    const double pivot_value = alpha[r];
    const double theta =
        pivot_value > 0.0 ? std::max(xb_[r], 0.0) / pivot_value : 0.0;
    xb_ -= theta * alpha;
    xb_[r] = theta;

    const int leaving = basis_[static_cast<size_t>(r)];
    in_basis_[static_cast<size_t>(leaving)] = 0;
    in_basis_[static_cast<size_t>(q)] = 1;
    basis_[static_cast<size_t>(r)] = q;
    factor_.push_eta(r, alpha);
    ++iterations_;

    if (theta <= degen_eps_) {
      if (++stall_ > 2 * (m_ + n_)) bland_ = true;
    } else {
      stall_ = 0;
      bland_ = false;
    }
  }

  /// Swaps residual basic artificials for structural or slack columns where
  /// the row admits a usable pivot; rows that admit none are dependent and
  /// keep their artificial pinned at zero.
  void pivot_out_artificials() {
    for (Index r = 0; r < m_; ++r) {
      if (basis_[static_cast<size_t>(r)] < n_ + m_) continue;
      Vector unit = Vector::Zero(m_);
      unit[r] = 1.0;
      const Vector rho = factor_.btran(unit);
      int best = -1;
      double best_mag = opts_.pivot_tol;
      for (Index j = 0; j < n_; ++j) {
        if (in_basis_[static_cast<size_t>(j)]) continue;
        double dot = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(a_, j); it; ++it)
          dot += it.value() * rho[it.row()];
        if (std::abs(dot) > best_mag) {
          best_mag = std::abs(dot);
          best = static_cast<int>(j);
        }
      }
      for (Index i = 0; i < m_; ++i) {
        if (in_basis_[static_cast<size_t>(n_ + i)]) continue;
        if (std::abs(rho[i]) > best_mag) {
          best_mag = std::abs(rho[i]);
          best = static_cast<int>(n_ + i);
        }
      }
      if (best < 0) continue;
      const Vector alpha = factor_.ftran(column(best));
      pivot(best, r, alpha);
      if (factor_.eta_count() >= opts_.refactor_interval) refactor();
    }
  }

  Eigen::SparseMatrix<double> a_;
  Vector cost_;
  Vector rhs_;
  SolverOptions opts_;
  Index m_;
  Index n_;
  long max_iterations_ = 0;
  double feas_eps_ = 0.0;
  double degen_eps_ = 0.0;
  double cost_scale_ = 1.0;

  std::vector<int> basis_;
  std::vector<signed char> in_basis_;
  Vector xb_;
  BasisFactor factor_;
  bool needs_phase_one_ = false;
  bool phase_one_ = false;
  bool bland_ = false;
  long stall_ = 0;
  long iterations_ = 0;
};

inline Eigen::SparseMatrix<double> sparsify(const Matrix& g) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(g.size()) / 4 + 16);
  for (Index j = 0; j < g.cols(); ++j)
    for (Index i = 0; i < g.rows(); ++i)
      if (g(i, j) != 0.0) trips.emplace_back(i, j, g(i, j));
  Eigen::SparseMatrix<double> a(g.rows(), g.cols());
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

inline Eigen::SparseMatrix<double> sparsify_negated_transpose(const Matrix& g) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(g.size()) / 4 + 16);
  for (Index j = 0; j < g.cols(); ++j)
    for (Index i = 0; i < g.rows(); ++i)
      if (g(i, j) != 0.0) trips.emplace_back(j, i, -g(i, j));
  Eigen::SparseMatrix<double> a(g.cols(), g.rows());
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

inline LpSolution solve_canonical_once(const LpProblem& p, const SolverOptions& opts) {
  const Index m = p.rows(), n = p.cols();
  const bool via_dual =
      opts.orientation == SolverOptions::Orientation::Dual ||
      (opts.orientation == SolverOptions::Orientation::Auto && m > 2 * n && m >= 32);

  LpSolution sol;
  if (!via_dual) {
    SimplexCore core(sparsify(p.constraint_matrix), p.objective, p.rhs, opts);
    CoreResult res = core.run();
    sol.status = res.status;
    sol.iterations = res.iterations;
    if (res.status == LpStatus::Optimal) {
      sol.primal = std::move(res.x);
      sol.duals = std::move(res.y);
      sol.objective = res.objective;
    }
    return sol;
  }

  // max <-rhs, pi> s.t. -G^T pi <= -objective, pi >= 0: the dual has the
  // small basis when m >> n, and its multipliers recover the primal point.
  SimplexCore core(sparsify_negated_transpose(p.constraint_matrix),
                   Vector(-p.rhs), Vector(-p.objective), opts);
  CoreResult res = core.run();
  sol.iterations = res.iterations;
  switch (res.status) {
    case LpStatus::Optimal:
      sol.status = LpStatus::Optimal;
      sol.primal = std::move(res.y);
      sol.duals = std::move(res.x);
      sol.objective = p.objective.dot(sol.primal);
      break;
    case LpStatus::Unbounded:
      sol.status = LpStatus::Infeasible;
      break;
    case LpStatus::Infeasible: {
      // Dual infeasibility leaves primal infeasible vs unbounded open; a
      // phase-1 probe on the primal orientation settles it.
      SimplexCore probe(sparsify(p.constraint_matrix), p.objective, p.rhs, opts);
      sol.status = probe.feasible() ? LpStatus::Unbounded : LpStatus::Infeasible;
      break;
    }
  }
  return sol;
}

}  // namespace detail

/// Solves a canonical-form LP.  Throws NumericalFailure when no certified
/// result can be produced; Infeasible and Unbounded are regular statuses.
inline LpSolution solve_lp(const LpProblem& p, const SolverOptions& opts = {}) {
  p.validate();
  const Index m = p.rows(), n = p.cols();

  if (n == 0) {
    LpSolution sol;
    if (m > 0 && p.rhs.minCoeff() < 0.0) {
      sol.status = LpStatus::Infeasible;
    } else {
      sol.status = LpStatus::Optimal;
      sol.primal = Vector();
      sol.duals = Vector::Zero(m);
      sol.objective = 0.0;
    }
    return sol;
  }
  if (m == 0) {
    LpSolution sol;
    if (p.objective.maxCoeff() > 0.0) {
      sol.status = LpStatus::Unbounded;
    } else {
      sol.status = LpStatus::Optimal;
      sol.primal = Vector::Zero(n);
      sol.duals = Vector();
      sol.objective = 0.0;
    }
    return sol;
  }

  // One round of two-sided equilibration with power-of-two factors (exact in
  // floating point).  Dantzig pricing is scale-sensitive, and mixed-magnitude
  // rows or columns otherwise push it into long degenerate stalls.
  LpProblem scaled = p;
  Vector row_factor = Vector::Ones(m);
  for (Index i = 0; i < m; ++i) {
    const double r = scaled.constraint_matrix.row(i).norm();
    if (r > 1e-300 && r < 1e300) {
      row_factor[i] = std::exp2(-std::round(std::log2(r)));
      scaled.constraint_matrix.row(i) *= row_factor[i];
      scaled.rhs[i] *= row_factor[i];
    }
  }
  Vector col_factor = Vector::Ones(n);
  for (Index j = 0; j < n; ++j) {
    const double cn = scaled.constraint_matrix.col(j).norm();
    if (cn > 1e-300 && cn < 1e300) {
      col_factor[j] = std::exp2(-std::round(std::log2(cn)));
      scaled.constraint_matrix.col(j) *= col_factor[j];
      scaled.objective[j] *= col_factor[j];
    }
  }

  SolverOptions attempt = opts;
  std::string last_failure;
  for (int round = 0; round < 2; ++round) {
    LpSolution sol;
    try {
      sol = detail::solve_canonical_once(scaled, attempt);
    } catch (const NumericalFailure& err) {
      if (round == 1) throw;
      last_failure = err.what();
      attempt.refactor_interval = std::max(10, attempt.refactor_interval / 4);
      attempt.pivot_tol = std::max(attempt.pivot_tol, 1e-9);
      continue;
    }
    if (sol.status != LpStatus::Optimal) return sol;
    sol.primal = sol.primal.cwiseProduct(col_factor);
    sol.duals = sol.duals.cwiseProduct(row_factor);
    sol.objective = p.objective.dot(sol.primal);
    if (verify_solution(p, sol, opts).pass) return sol;
    last_failure = "certificate check failed";
    attempt.refactor_interval = std::max(10, attempt.refactor_interval / 4);
    attempt.pivot_tol = std::max(attempt.pivot_tol, 1e-9);
  }
  throw NumericalFailure("solve_lp: no certified optimum (" + last_failure + ")");
}

}  // namespace stodec
