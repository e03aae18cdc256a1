#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace stodec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for every error raised by the toolkit. Catching this is enough
/// to distinguish "the solve went wrong" from a programming error
/// (std::invalid_argument / std::logic_error are reserved for misuse).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// The simplex core lost too much accuracy to certify a result, or ran out
/// of its iteration budget. Callers should treat this as "instance is
/// numerically hostile", not as infeasibility.
class NumericalFailure : public SolverError {
 public:
  using SolverError::SolverError;
};

/// A problem that the surrounding algorithm needs to be solvable (first
/// stage, extensive form, ball stage) came back infeasible or unbounded.
/// For unboundedness, `coordinate` names the runaway direction when known.
class ProblemInfeasible : public SolverError {
 public:
  using SolverError::SolverError;
};

class ProblemUnbounded : public SolverError {
 public:
  explicit ProblemUnbounded(const std::string& what, int coordinate_in = -1)
      : SolverError(what), coordinate(coordinate_in) {}
  int coordinate;
};

/// Recourse subproblem infeasible or unbounded. `scenario` is the index of
/// the offending scenario when known, -1 otherwise.
class RecourseInfeasible : public SolverError {
 public:
  explicit RecourseInfeasible(const std::string& what, int scenario_index = -1)
      : SolverError(what), scenario(scenario_index) {}
  int scenario;
};

class RecourseUnbounded : public SolverError {
 public:
  explicit RecourseUnbounded(const std::string& what, int scenario_index = -1)
      : SolverError(what), scenario(scenario_index) {}
  int scenario;
};

/// Raised by the decoupling sweep when a fixed-norm recourse subproblem is
/// infeasible or unbounded; carries both coordinates of the failing cell.
class AssumptionViolation : public SolverError {
 public:
  AssumptionViolation(const std::string& what, int scenario_index, int grid_index)
      : SolverError(what), scenario(scenario_index), k(grid_index) {}
  int scenario;
  int k;
};

/// The radius grid stops short of the first-stage optimum's norm, so the
/// sweep cannot bracket the maximizer. Enlarge k_max or delta.
class GridTooShort : public SolverError {
 public:
  GridTooShort(const std::string& what, double grid_end_in, double required_in)
      : SolverError(what), grid_end(grid_end_in), required(required_in) {}
  double grid_end;
  double required;
};

/// The cutting-plane loop for the ball-constrained stage exceeded its cut
/// budget without closing the feasibility gap.
class MaxCutsExceeded : public SolverError {
 public:
  using SolverError::SolverError;
};

/// The restricted master in the L-shaped method is unbounded even with its
/// initial recourse bound, i.e. the first stage itself is unbounded.
class MasterUnbounded : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Instance file is not syntactically well formed (bad JSON, missing or
/// mis-typed field, ragged matrix). The message names the offending field.
class ParseError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Instance file parsed but violates a semantic invariant (dimension
/// mismatch, probability sum, non-finite entry).
class ValidationError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace stodec
