#include "stodec/decouple.hpp"

#include "stodec/baselines.hpp"
#include "stodec/model.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

using namespace stodec;
using Catch::Approx;

namespace {

StochasticProgram interval_program(std::vector<double> t, std::vector<double> h,
                                   std::vector<double> prob) {
  // First stage x in [0, 1] with c = 1; scalar recourse max y, y <= h_s - t_s x.
  StochasticProgram prog;
  prog.first_stage.A = Matrix::Identity(1, 1);
  prog.first_stage.b = Vector::Constant(1, 1.0);
  prog.first_stage.c = Vector::Constant(1, 1.0);
  for (size_t s = 0; s < t.size(); ++s) {
    Scenario sc;
    sc.T = Matrix::Constant(1, 1, t[s]);
    sc.W = Matrix::Constant(1, 1, 1.0);
    sc.h = Vector::Constant(1, h[s]);
    sc.q = Vector::Constant(1, 1.0);
    sc.probability = prob[s];
    prog.scenarios.push_back(sc);
  }
  return prog;
}

// Coupled optimum of an interval program by dense search over x in [0, 1].
double interval_oracle(const StochasticProgram& prog, int steps = 20000) {
  double best = -1e300;
  for (int i = 0; i <= steps; ++i) {
    const double x = static_cast<double>(i) / steps;
    double z = prog.first_stage.c[0] * x;
    bool ok = true;
    for (const auto& sc : prog.scenarios) {
      const double cap = sc.h[0] - sc.T(0, 0) * x;
      if (cap < 0.0) {
        ok = false;
        break;
      }
      z += sc.probability * cap;
    }
    if (ok) best = std::max(best, z);
  }
  return best;
}

StochasticProgram gaussian_program(std::uint64_t seed, Index n1 = 4, Index m2 = 10,
                                   Index n2 = 4, int scenarios = 8) {
  GeneratorConfig cfg;
  cfg.m1 = 20;
  cfg.n1 = n1;
  cfg.m2 = m2;
  cfg.n2 = n2;
  cfg.h_magnitude = 3.0;
  cfg.num_scenarios = scenarios;
  cfg.seed = seed;
  return generate_gaussian_instance(cfg);
}

}  // namespace

TEST_CASE("interval program maximized at the origin", "[decouple]") {
  // z(x) = x + (3 - 2x) = 3 - x, so the sweep must pick k = 0.
  const auto prog = interval_program({2.0}, {3.0}, {1.0});
  DecouplingConfig cfg;
  cfg.delta = 0.25;
  cfg.k_max = 4;
  const auto res = run_decoupling(prog, cfg);

  REQUIRE(res.best_k == 0);
  REQUIRE(res.z_hat == Approx(3.0).margin(1e-7));
  REQUIRE(res.z_hat == Approx(interval_oracle(prog)).margin(1e-4));
  REQUIRE(res.unconstrained_norm == Approx(1.0).margin(1e-7));
  REQUIRE(res.Z1.size() == res.X.size());
  for (Index k = 0; k < res.X.size(); ++k) {
    REQUIRE(res.X[k] == Approx(0.25 * static_cast<double>(k)).margin(1e-7));
    REQUIRE(res.Z1[k] == Approx(0.25 * static_cast<double>(k)).margin(1e-7));
    REQUIRE(res.Z2_expected[k] == Approx(3.0 - 0.5 * static_cast<double>(k)).margin(1e-7));
    REQUIRE(res.Z[k] == res.Z1[k] + res.Z2_expected[k]);
  }
}

TEST_CASE("interval program maximized at the far end", "[decouple]") {
  // z(x) = x + 0.5(3 - 2x) + 0.5(1 + x) = 2 + x/2, maximized at x = 1.
  const auto prog = interval_program({2.0, -1.0}, {3.0, 1.0}, {0.5, 0.5});
  DecouplingConfig cfg;
  cfg.delta = 0.25;
  cfg.k_max = 4;
  const auto res = run_decoupling(prog, cfg);
  REQUIRE(res.best_k == 4);
  REQUIRE(res.z_hat == Approx(2.5).margin(1e-7));
  REQUIRE(res.z_hat == Approx(interval_oracle(prog)).margin(1e-4));
}

TEST_CASE("zero technology reproduces the extensive optimum", "[decouple]") {
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    StochasticProgram prog = gaussian_program(seed);
    for (auto& sc : prog.scenarios) sc.T.setZero();

    const auto extensive = solve_lp(build_extensive(prog));
    REQUIRE(extensive.status == LpStatus::Optimal);

    const double norm = solve_unconstrained_stage1(prog.first_stage).norm;
    DecouplingConfig cfg;
    cfg.delta = std::max(norm, 1e-3) / 50.0;
    cfg.k_max = 100;
    const auto res = run_decoupling(prog, cfg);

    REQUIRE(std::abs(res.z_hat - extensive.objective) <=
            1e-6 * (1.0 + std::abs(extensive.objective)));
  }
}

TEST_CASE("norm profile and first-stage curve obey their invariants", "[decouple]") {
  const StochasticProgram prog = gaussian_program(11);
  DecouplingConfig cfg;
  cfg.delta = 0.05;
  cfg.k_max = 100;
  const auto res = run_decoupling(prog, cfg);

  const double norm = res.unconstrained_norm;
  REQUIRE(cfg.delta * cfg.k_max >= norm);
  for (Index k = 0; k < res.X.size(); ++k) {
    const double expect = std::min(cfg.delta * static_cast<double>(k), norm);
    REQUIRE(std::abs(res.X[k] - expect) <= 1e-6 * (1.0 + expect));
    if (k > 0) REQUIRE(res.Z1[k] >= res.Z1[k - 1] - 1e-6 * (1.0 + std::abs(res.Z1[k - 1])));
    REQUIRE(res.Z[k] == res.Z1[k] + res.Z2_expected[k]);
    REQUIRE(res.Z[k] <= res.z_hat);
  }
  REQUIRE(res.Z[res.best_k] == res.z_hat);
  for (Index k = 0; k < res.best_k; ++k) REQUIRE(res.Z[k] < res.z_hat);

  const int k_eff = static_cast<int>(std::ceil(res.X.maxCoeff() / cfg.delta)) + 2;
  REQUIRE(res.k_max_effective == k_eff);
  REQUIRE(res.Z1.size() == std::min(cfg.k_max, k_eff) + 1);
}

TEST_CASE("zero objective collapses the grid to one group", "[decouple]") {
  StochasticProgram prog = gaussian_program(3);
  prog.first_stage.c.setZero();
  DecouplingConfig cfg;
  cfg.delta = 0.1;
  cfg.k_max = 10;
  cfg.retain_scenario_table = true;
  const auto res = run_decoupling(prog, cfg);

  REQUIRE(res.best_k == 0);
  REQUIRE(res.unconstrained_norm == 0.0);
  for (Index k = 0; k < res.X.size(); ++k) {
    REQUIRE(res.X[k] == 0.0);
    REQUIRE(res.Z1[k] == 0.0);
    REQUIRE(res.Z2_expected[k] == res.Z2_expected[0]);
  }
  REQUIRE(res.Z2.rows() == prog.num_scenarios());
  REQUIRE(res.Z2.cols() == res.X.size());
  for (Index k = 1; k < res.Z2.cols(); ++k) REQUIRE(res.Z2.col(k) == res.Z2.col(0));
}

TEST_CASE("scenario table columns reproduce the expectation", "[decouple]") {
  const StochasticProgram prog = gaussian_program(13, 3, 8, 3, 5);
  DecouplingConfig cfg;
  cfg.delta = 0.05;
  cfg.k_max = 60;
  cfg.retain_scenario_table = true;
  const auto res = run_decoupling(prog, cfg);
  REQUIRE(res.Z2.rows() == 5);
  REQUIRE(res.Z2.cols() == res.Z2_expected.size());
  for (Index k = 0; k < res.Z2.cols(); ++k) {
    double acc = 0.0;
    for (Index s = 0; s < res.Z2.rows(); ++s)
      acc += prog.scenarios[static_cast<size_t>(s)].probability * res.Z2(s, k);
    REQUIRE(acc == Approx(res.Z2_expected[k]).margin(1e-9));
  }
  // The table is off by default.
  DecouplingConfig plain = cfg;
  plain.retain_scenario_table = false;
  REQUIRE(run_decoupling(prog, plain).Z2.size() == 0);
}

TEST_CASE("sweep results are thread-count invariant", "[decouple]") {
  const StochasticProgram prog = gaussian_program(17);
  DecouplingConfig cfg;
  cfg.delta = 0.05;
  cfg.k_max = 80;
  cfg.threads = 1;
  const auto serial = run_decoupling(prog, cfg);
  for (int threads : {0, 2, 4}) {
    cfg.threads = threads;
    const auto par = run_decoupling(prog, cfg);
    REQUIRE(par.z_hat == serial.z_hat);
    REQUIRE(par.best_k == serial.best_k);
    REQUIRE(par.Z == serial.Z);
    REQUIRE(par.X == serial.X);
  }
}

TEST_CASE("short grids are refused up front", "[decouple]") {
  // Box [0,1]^2 with positive costs: the optimum norm is sqrt(2).
  StochasticProgram prog;
  prog.first_stage.A = Matrix::Identity(2, 2);
  prog.first_stage.b = Vector::Constant(2, 1.0);
  prog.first_stage.c = Vector::Constant(2, 0.5);
  Scenario sc;
  sc.T = Matrix::Zero(1, 2);
  sc.W = Matrix::Constant(1, 1, 1.0);
  sc.h = Vector::Constant(1, 1.0);
  sc.q = Vector::Constant(1, 1.0);
  sc.probability = 1.0;
  prog.scenarios.push_back(sc);

  DecouplingConfig cfg;
  cfg.delta = 0.01;
  cfg.k_max = 100;
  try {
    run_decoupling(prog, cfg);
    FAIL("expected GridTooShort");
  } catch (const GridTooShort& err) {
    REQUIRE(err.grid_end == Approx(1.0).margin(1e-12));
    REQUIRE(err.required == Approx(std::sqrt(2.0)).margin(1e-6));
  }

  cfg.k_max = 150;
  REQUIRE_NOTHROW(run_decoupling(prog, cfg));
}

TEST_CASE("recourse failure inside the sweep names the cell", "[decouple]") {
  // The scenario is feasible only for rho <= 0.2, so the sweep dies at k = 1.
  auto prog = interval_program({1.0}, {0.2}, {1.0});
  DecouplingConfig cfg;
  cfg.delta = 0.25;
  cfg.k_max = 4;
  cfg.threads = 1;
  try {
    run_decoupling(prog, cfg);
    FAIL("expected AssumptionViolation");
  } catch (const AssumptionViolation& err) {
    REQUIRE(err.scenario == 0);
    REQUIRE(err.k == 1);
  }
}

TEST_CASE("configuration errors are rejected", "[decouple]") {
  const auto prog = interval_program({1.0}, {2.0}, {1.0});
  DecouplingConfig cfg;
  cfg.delta = 0.0;
  REQUIRE_THROWS_AS(run_decoupling(prog, cfg), std::invalid_argument);
  cfg.delta = 0.25;
  cfg.k_max = 0;
  REQUIRE_THROWS_AS(run_decoupling(prog, cfg), std::invalid_argument);

  auto bad = prog;
  bad.scenarios[0].probability = 0.4;
  cfg.k_max = 10;
  REQUIRE_THROWS_AS(run_decoupling(bad, cfg), ValidationError);
}

TEST_CASE("invariance estimate vanishes without technology", "[decouple]") {
  StochasticProgram prog = gaussian_program(19);
  for (auto& sc : prog.scenarios) sc.T.setZero();
  const auto est = estimate_invariance_epsilon(prog, 0.8, 12, 7);
  REQUIRE(est.epsilon_hat <= 1e-12);
  REQUIRE(est.num_probes == 12);
  REQUIRE(est.norm_tested == 0.8);
  REQUIRE(est.mean_recourse ==
          Approx(expected_recourse_fixed_norm(prog, 0.8)).margin(1e-9));
}

TEST_CASE("probing along the reference axis is exact", "[decouple]") {
  const StochasticProgram prog = gaussian_program(23, 4, 40, 4, 8);
  Vector e1 = Vector::Zero(prog.n1());
  e1[0] = 1.0;
  const auto est = estimate_invariance_epsilon(prog, 0.5, {e1});
  REQUIRE(est.epsilon_hat <= 1e-12);
  REQUIRE(est.num_probes == 1);
}

TEST_CASE("invariance estimate is small but positive at scale", "[decouple]") {
  const StochasticProgram prog = gaussian_program(29, 6, 100, 10, 10);
  const auto est = estimate_invariance_epsilon(prog, 0.5, 20, 123);
  REQUIRE(est.epsilon_hat > 0.0);
  REQUIRE(est.mean_recourse != 0.0);
  REQUIRE(est.epsilon_hat / std::abs(est.mean_recourse) < 0.2);

  const auto again = estimate_invariance_epsilon(prog, 0.5, 20, 123);
  REQUIRE(again.epsilon_hat == est.epsilon_hat);
  const auto other = estimate_invariance_epsilon(prog, 0.5, 20, 124);
  REQUIRE(other.epsilon_hat != est.epsilon_hat);
}

TEST_CASE("invariance probe argument errors", "[decouple]") {
  const auto prog = interval_program({1.0}, {2.0}, {1.0});
  REQUIRE_THROWS_AS(estimate_invariance_epsilon(prog, -1.0, 4, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(estimate_invariance_epsilon(prog, 1.0, 0, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(estimate_invariance_epsilon(prog, 1.0, std::vector<Vector>{}),
                    std::invalid_argument);
}
