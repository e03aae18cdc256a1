#pragma once

#include "stodec/bench.hpp"
#include "stodec/instance_io.hpp"
#include "stodec/types.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace stodec {

/**
 * Command-line front end.
 *
 *   generate         emit an instance file from generator flags
 *   solve            run one method on an instance file, print diagnostics
 *   probe-invariance estimate the rotational-invariance deviation
 *   bench            run the benchmark grid, emit CSV and a text table
 *
 * Exit codes: 0 success, 1 usage error, 2 solve or assumption failure
 * (including unreadable/invalid instance files).
 */

namespace detail {

struct CliGlobals {
  std::uint64_t seed = 0;
  double delta = 0.01;
  int kmax = 100;
  double gap_tol = 0.02;
  int threads = 0;
  std::string output;
  std::string format = "table";
};

inline void print_solver_error(const SolverError& err) {
  std::cerr << "error: " << err.what() << "\n";
  if (const auto* e = dynamic_cast<const RecourseInfeasible*>(&err)) {
    std::cerr << "status: recourse-infeasible";
    if (e->scenario >= 0) std::cerr << "; scenario: " << e->scenario;
    std::cerr << "\n";
  } else if (const auto* e = dynamic_cast<const RecourseUnbounded*>(&err)) {
    std::cerr << "status: recourse-unbounded";
    if (e->scenario >= 0) std::cerr << "; scenario: " << e->scenario;
    std::cerr << "\n";
  } else if (const auto* e = dynamic_cast<const AssumptionViolation*>(&err)) {
    std::cerr << "status: assumption-violation; scenario: " << e->scenario
              << "; k: " << e->k << "\n";
  } else if (const auto* e = dynamic_cast<const GridTooShort*>(&err)) {
    std::cerr << "status: grid-too-short; grid_end: " << e->grid_end
              << "; required: " << e->required << "\n";
  } else if (dynamic_cast<const ProblemInfeasible*>(&err) != nullptr) {
    std::cerr << "status: infeasible\n";
  } else if (dynamic_cast<const ProblemUnbounded*>(&err) != nullptr) {
    std::cerr << "status: unbounded\n";
  } else if (dynamic_cast<const ParseError*>(&err) != nullptr) {
    std::cerr << "status: parse-error\n";
  } else if (dynamic_cast<const ValidationError*>(&err) != nullptr) {
    std::cerr << "status: validation-error\n";
  } else {
    std::cerr << "status: solver-failure\n";
  }
}

inline int run_generate(const CliGlobals& g, GeneratorConfig gen) {
  gen.seed = g.seed;
  const StochasticProgram prog = generate_gaussian_instance(gen);
  if (g.output.empty()) {
    save_instance(prog, std::cout);
  } else {
    save_instance(prog, g.output);
    std::cerr << "wrote " << g.output << "\n";
  }
  return 0;
}

inline int run_solve(const CliGlobals& g, const std::string& method,
                     const std::string& instance_path) {
  const StochasticProgram prog = load_instance(instance_path);
  const auto t0 = std::chrono::steady_clock::now();
  if (method == "extensive") {
    const ExtensiveSolution sol = solve_extensive(prog);
    std::cout << "method: extensive\n"
              << "objective: " << shortest_real(sol.objective) << "\n"
              << "time_s: " << shortest_real(seconds_since(t0)) << "\n"
              << "lp_rows: " << sol.build_stats.rows
              << "\nlp_cols: " << sol.build_stats.cols
              << "\nlp_iterations: " << sol.lp_iterations << "\n";
  } else if (method == "decouple") {
    DecouplingConfig cfg;
    cfg.delta = g.delta;
    cfg.k_max = g.kmax;
    cfg.threads = g.threads;
    const DecouplingResult res = run_decoupling(prog, cfg);
    std::cout << "method: decouple\n"
              << "objective: " << shortest_real(res.z_hat) << "\n"
              << "time_s: " << shortest_real(seconds_since(t0)) << "\n"
              << "best_k: " << res.best_k << "\nk_max_effective: " << res.k_max_effective
              << "\nunconstrained_norm: " << shortest_real(res.unconstrained_norm)
              << "\n";
  } else if (method == "benders") {
    const BendersResult res = run_benders(prog, g.gap_tol, 500, {}, g.threads);
    std::cout << "method: benders\n"
              << "objective: " << shortest_real(res.objective) << "\n"
              << "time_s: " << shortest_real(seconds_since(t0)) << "\n"
              << "iterations: " << res.iterations << "\nfinal_gap: "
              << shortest_real(res.final_gap) << "\nconverged: "
              << (res.converged ? "true" : "false") << "\n";
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  } else {
    const double value = run_naive(prog, {}, g.threads);
    std::cout << "method: naive\n"
              << "objective: " << shortest_real(value) << "\n"
              << "time_s: " << shortest_real(seconds_since(t0)) << "\n";
  }
  return 0;
}

inline int run_probe(const CliGlobals& g, const std::string& instance_path, double rho,
                     int probes) {
  const StochasticProgram prog = load_instance(instance_path);
  const InvarianceEstimate est =
      estimate_invariance_epsilon(prog, rho, probes, g.seed, {}, g.threads);
  std::cout << "epsilon_hat: " << shortest_real(est.epsilon_hat) << "\n"
            << "num_probes: " << est.num_probes << "\n"
            << "norm_tested: " << shortest_real(est.norm_tested) << "\n"
            << "mean_recourse: " << shortest_real(est.mean_recourse) << "\n";
  return 0;
}

inline int run_bench(const CliGlobals& g, BenchConfig cfg) {
  cfg.delta = g.delta;
  cfg.k_max = g.kmax;
  cfg.gap_tol = g.gap_tol;
  cfg.seed_base = g.seed;
  cfg.threads = g.threads;
  const std::vector<BenchmarkRecord> records = run_benchmark(cfg, &std::cerr);
  if (!g.output.empty()) {
    std::ofstream out(g.output);
    if (!out) throw std::runtime_error("bench: cannot open '" + g.output + "'");
    write_csv(out, records);
    std::cerr << "wrote " << g.output << "\n";
  }
  if (g.format == "csv")
    write_csv(std::cout, records);
  else
    write_table(std::cout, records);
  return 0;
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Two-stage stochastic LP toolkit: norm-decoupling solver, "
               "extensive-form and L-shaped baselines, benchmark harness"};
  app.require_subcommand(1);

  detail::CliGlobals g;
  app.add_option("--seed", g.seed, "Base RNG seed")->capture_default_str();
  app.add_option("--delta", g.delta, "Radius grid step")->capture_default_str();
  app.add_option("--kmax", g.kmax, "Initial radius grid length")->capture_default_str();
  app.add_option("--gap-tol", g.gap_tol, "L-shaped relative gap tolerance")
      ->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = hardware)")
      ->capture_default_str();
  app.add_option("--output", g.output, "Output file (subcommand-specific)");
  app.add_option("--format", g.format, "stdout format for bench")
      ->check(CLI::IsMember({"csv", "table"}))
      ->capture_default_str();

  GeneratorConfig gen;
  auto* generate = app.add_subcommand("generate", "Generate a Gaussian instance file");
  generate->fallthrough();
  generate->add_option("--m1", gen.m1, "First-stage rows")->capture_default_str();
  generate->add_option("--n1", gen.n1, "First-stage variables")->capture_default_str();
  generate->add_option("--m2", gen.m2, "Recourse rows")->capture_default_str();
  generate->add_option("--n2", gen.n2, "Recourse variables")->capture_default_str();
  generate->add_option("--scenarios", gen.num_scenarios, "Scenario count")
      ->capture_default_str();
  generate->add_option("--h-magnitude", gen.h_magnitude,
                       "Recourse right-hand-side magnitude")
      ->capture_default_str();

  std::string method;
  std::string instance_path;
  auto* solve = app.add_subcommand("solve", "Solve an instance with one method");
  solve->fallthrough();
  solve->add_option("--method", method, "One of extensive|decouple|benders|naive")
      ->required()
      ->check(CLI::IsMember({"extensive", "decouple", "benders", "naive"}));
  solve->add_option("--instance", instance_path, "Instance file")->required();

  double rho = 1.0;
  int probes = 20;
  std::string probe_instance;
  auto* probe = app.add_subcommand("probe-invariance",
                                   "Estimate the rotational-invariance deviation");
  probe->fallthrough();
  probe->add_option("--instance", probe_instance, "Instance file")->required();
  probe->add_option("--rho", rho, "Radius at which to probe")->required();
  probe->add_option("--probes", probes, "Number of random directions")
      ->capture_default_str();

  BenchConfig bench_cfg;
  auto* bench = app.add_subcommand("bench", "Run the benchmark grid");
  bench->fallthrough();
  bench->add_option("--runs", bench_cfg.runs, "Runs per cell")->capture_default_str();
  bench->add_option("--n-values", bench_cfg.n_values, "Grid of n1 = n2 values");
  bench->add_option("--h-values", bench_cfg.h_values, "Grid of h magnitudes");
  bench->add_option("--m1", bench_cfg.m1, "First-stage rows")->capture_default_str();
  bench->add_option("--m2", bench_cfg.m2, "Recourse rows")->capture_default_str();
  bench->add_option("--scenarios", bench_cfg.num_scenarios, "Scenario count")
      ->capture_default_str();
  bench->add_flag("--fixed-first-stage", bench_cfg.fixed_first_stage,
                  "Share one (A, c, q) draw per n across runs and h values");
  bench->add_flag("--zero-technology", bench_cfg.zero_technology,
                  "Force T = 0 in every scenario (exact-invariance check)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (generate->parsed()) return detail::run_generate(g, gen);
    if (solve->parsed()) return detail::run_solve(g, method, instance_path);
    if (probe->parsed()) return detail::run_probe(g, probe_instance, rho, probes);
    return detail::run_bench(g, bench_cfg);
  } catch (const SolverError& err) {
    detail::print_solver_error(err);
    return 2;
  } catch (const std::invalid_argument& err) {
    std::cerr << "usage error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}

inline int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace stodec
