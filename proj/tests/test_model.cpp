#include "stodec/model.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace stodec;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

GeneratorConfig paper_config() {
  GeneratorConfig cfg;
  cfg.m1 = 100;
  cfg.n1 = 5;
  cfg.m2 = 100;
  cfg.n2 = 5;
  cfg.h_magnitude = 2.0;
  cfg.num_scenarios = 50;
  cfg.seed = 0;
  return cfg;
}

}  // namespace

TEST_CASE("generator postconditions at reference dimensions", "[model]") {
  const StochasticProgram prog = generate_gaussian_instance(paper_config());
  REQUIRE(prog.first_stage.m1() == 100);
  REQUIRE(prog.first_stage.n1() == 5);
  REQUIRE(prog.num_scenarios() == 50);
  REQUIRE_THAT(prog.first_stage.c.norm(), WithinAbs(0.5, 1e-12));
  REQUIRE((prog.first_stage.b.array() == 1.0).all());
  for (const auto& sc : prog.scenarios) {
    REQUIRE_THAT(sc.q.norm(), WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(sc.probability, WithinAbs(0.02, 1e-15));
    REQUIRE((sc.h.array() == 2.0).all());
    REQUIRE(sc.T.rows() == 100);
    REQUIRE(sc.T.cols() == 5);
    REQUIRE(sc.W.rows() == 100);
    REQUIRE(sc.W.cols() == 5);
  }
  REQUIRE(validate(prog).valid());
}

TEST_CASE("generator is deterministic per seed", "[model]") {
  const StochasticProgram a = generate_gaussian_instance(paper_config());
  const StochasticProgram b = generate_gaussian_instance(paper_config());
  REQUIRE(a.first_stage.A == b.first_stage.A);
  REQUIRE(a.first_stage.c == b.first_stage.c);
  for (int s = 0; s < a.num_scenarios(); ++s) {
    REQUIRE(a.scenarios[s].T == b.scenarios[s].T);
    REQUIRE(a.scenarios[s].W == b.scenarios[s].W);
    REQUIRE(a.scenarios[s].q == b.scenarios[s].q);
  }
}

TEST_CASE("distinct seeds give distinct draws", "[model]") {
  GeneratorConfig cfg = paper_config();
  cfg.m1 = 4;
  cfg.n1 = 3;
  cfg.m2 = 4;
  cfg.n2 = 3;
  cfg.num_scenarios = 2;
  std::vector<Matrix> seen;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    cfg.seed = seed;
    seen.push_back(generate_gaussian_instance(cfg).first_stage.A);
  }
  for (size_t i = 0; i < seen.size(); ++i)
    for (size_t j = i + 1; j < seen.size(); ++j) REQUIRE(seen[i] != seen[j]);
}

TEST_CASE("technology entries look standard normal across seeds", "[model]") {
  GeneratorConfig cfg;
  cfg.m1 = 3;
  cfg.n1 = 2;
  cfg.m2 = 3;
  cfg.n2 = 2;
  cfg.num_scenarios = 2;
  double sum = 0.0, sumsq = 0.0;
  long count = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    cfg.seed = seed;
    const StochasticProgram prog = generate_gaussian_instance(cfg);
    for (const auto& sc : prog.scenarios) {
      sum += sc.T.sum();
      sumsq += sc.T.array().square().sum();
      count += sc.T.size();
    }
  }
  const double mean = sum / static_cast<double>(count);
  const double var = sumsq / static_cast<double>(count) - mean * mean;
  const double stderr_mean = 1.0 / std::sqrt(static_cast<double>(count));
  REQUIRE(std::abs(mean) <= 3.0 * stderr_mean);
  REQUIRE(var >= 0.9);
  REQUIRE(var <= 1.1);
}

TEST_CASE("validation message for a bad probability sum", "[model]") {
  GeneratorConfig cfg = paper_config();
  cfg.num_scenarios = 2;
  StochasticProgram prog = generate_gaussian_instance(cfg);
  prog.scenarios[0].probability = 0.5;
  prog.scenarios[1].probability = 0.6;
  const ValidationReport rep = validate(prog);
  REQUIRE_FALSE(rep.valid());
  bool found = false;
  for (const auto& v : rep.violations)
    if (v.find("probabilities sum to 1.1") != std::string::npos) found = true;
  REQUIRE(found);
}

TEST_CASE("validation names the scenario with bad dimensions", "[model]") {
  GeneratorConfig cfg = paper_config();
  cfg.num_scenarios = 3;
  StochasticProgram prog = generate_gaussian_instance(cfg);
  prog.scenarios[2].T = Matrix::Zero(100, 7);
  const ValidationReport rep = validate(prog);
  REQUIRE_FALSE(rep.valid());
  bool found = false;
  for (const auto& v : rep.violations)
    if (v.find("2") != std::string::npos && v.find("T") != std::string::npos) found = true;
  REQUIRE(found);
}

TEST_CASE("validation flags non-finite entries", "[model]") {
  GeneratorConfig cfg = paper_config();
  cfg.num_scenarios = 2;
  StochasticProgram prog = generate_gaussian_instance(cfg);
  prog.first_stage.A(0, 0) = std::numeric_limits<double>::infinity();
  REQUIRE_FALSE(validate(prog).valid());
}

TEST_CASE("feasible-norm bound on boxes and simplices", "[model]") {
  FirstStageData fs;
  fs.A = Matrix::Identity(2, 2);
  fs.b = Vector::Ones(2);
  fs.c = Vector::Ones(2);
  REQUIRE_THAT(max_feasible_norm(fs), WithinAbs(std::sqrt(2.0), 1e-9));

  fs.A = Matrix::Ones(1, 2);
  fs.b = Vector::Ones(1);
  REQUIRE_THAT(max_feasible_norm(fs), WithinAbs(std::sqrt(2.0), 1e-9));

  const Index n = 4;
  fs.A = Matrix::Zero(1 + n, n);
  fs.A.bottomRows(n) = Matrix::Identity(n, n);
  fs.b = Vector::Constant(1 + n, 2.0);
  fs.b[0] = 1.0;
  fs.c = Vector::Ones(n);
  REQUIRE_THAT(max_feasible_norm(fs), WithinAbs(2.0 * std::sqrt(double(n)), 1e-9));
}

TEST_CASE("feasible-norm bound reports unbounded coordinates", "[model]") {
  FirstStageData fs;
  fs.A = Matrix::Zero(1, 2);
  fs.A(0, 0) = 1.0;
  fs.b = Vector::Ones(1);
  fs.c = Vector::Ones(2);
  try {
    max_feasible_norm(fs);
    FAIL("expected ProblemUnbounded");
  } catch (const ProblemUnbounded& err) {
    REQUIRE(err.coordinate == 1);
  }
}

TEST_CASE("feasible-norm bound dominates the unconstrained optimum norm", "[model]") {
  GeneratorConfig cfg;
  cfg.m1 = 20;
  cfg.n1 = 4;
  cfg.m2 = 5;
  cfg.n2 = 3;
  cfg.num_scenarios = 2;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40 && checked < 15; ++seed) {
    cfg.seed = seed;
    const StochasticProgram prog = generate_gaussian_instance(cfg);
    double bound;
    try {
      bound = max_feasible_norm(prog.first_stage);
    } catch (const SolverError&) {
      continue;
    }
    const auto ref = oracles::solve_lp_bruteforce(
        prog.first_stage.c, prog.first_stage.A, prog.first_stage.b);
    if (ref.status != oracles::Status::Optimal) continue;
    REQUIRE(bound >= ref.x.norm() - 1e-9);
    ++checked;
  }
  REQUIRE(checked >= 15);
}
