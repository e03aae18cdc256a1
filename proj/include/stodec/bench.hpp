#pragma once

#include "stodec/baselines.hpp"
#include "stodec/decouple.hpp"
#include "stodec/instance_io.hpp"
#include "stodec/lshaped.hpp"
#include "stodec/model.hpp"
#include "stodec/types.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace stodec {

/**
 * Benchmark harness: a grid of (n1 = n2) x (h_magnitude) cells, each
 * averaged over `runs` independently drawn instances.  Per run it times the
 * extensive form, the decoupling sweep, and the L-shaped method, and records
 *
 *   Ngap = (z_e - z_naive)/|z_e| * 100   (signed; naive never beats z_e)
 *   Dgap = |z_e - z_hat|/|z_e| * 100     (two-sided; z_hat may overshoot)
 *
 * Gap columns are deterministic in the seed and independent of the thread
 * count; timing columns are wall-clock and therefore not reproducible.  A
 * run whose draw violates recourse feasibility/boundedness is resampled with
 * an incremented seed (counted); a cell aborts after max_consecutive_resamples
 * failures in a row.
 */

struct BenchmarkRecord {
  Index m1 = 0, n1 = 0, m2 = 0, n2 = 0;
  double h_magnitude = 0.0;
  double ngap_pct = 0.0;
  double dgap_pct = 0.0;
  double t_extensive_s = 0.0;
  double t_decouple_s = 0.0;
  double t_benders_s = 0.0;
  int runs = 0;
  std::uint64_t seed_base = 0;
  int resample_events = 0;
  bool aborted = false;
};

struct BenchConfig {
  std::vector<Index> n_values = {5, 10, 15, 20};
  std::vector<double> h_values = {2.0, 3.0, 4.0, 5.0};
  Index m1 = 100;
  Index m2 = 100;
  int runs = 50;
  int num_scenarios = 50;
  double delta = 0.01;
  int k_max = 100;
  double gap_tol = 0.02;
  std::uint64_t seed_base = 0;
  int threads = 0;
  /// Share one (A, c, q) realization per n across all runs and h values,
  /// redrawing only T and W per run.
  bool fixed_first_stage = false;
  /// Test hook: zero every technology matrix (exact norm-invariance limit).
  bool zero_technology = false;
  int max_consecutive_resamples = 10;
};

namespace detail {

struct RunOutcome {
  double ngap = 0.0, dgap = 0.0;
  double t_e = 0.0, t_d = 0.0, t_b = 0.0;
};

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// One measured run on a fixed instance seed.  Assumption violations
/// propagate as exceptions for the caller's resample loop.
inline RunOutcome bench_single_run(const BenchConfig& cfg, Index n, double h,
                                   std::uint64_t instance_seed,
                                   const StochasticProgram* shared_first_stage,
                                   std::ostream* log) {
  GeneratorConfig gen;
  gen.m1 = cfg.m1;
  gen.n1 = n;
  gen.m2 = cfg.m2;
  gen.n2 = n;
  gen.h_magnitude = h;
  gen.num_scenarios = cfg.num_scenarios;
  gen.seed = instance_seed;
  StochasticProgram prog = generate_gaussian_instance(gen);
  if (shared_first_stage != nullptr) {
    prog.first_stage = shared_first_stage->first_stage;
    for (auto& sc : prog.scenarios)
      sc.q = shared_first_stage->scenarios.front().q;
  }
  if (cfg.zero_technology)
    for (auto& sc : prog.scenarios) sc.T.setZero();

  RunOutcome out;
  auto t0 = std::chrono::steady_clock::now();
  const ExtensiveSolution ext = solve_extensive(prog);
  out.t_e = seconds_since(t0);

  DecouplingConfig dec;
  dec.delta = cfg.delta;
  dec.k_max = cfg.k_max;
  dec.threads = cfg.threads;
  t0 = std::chrono::steady_clock::now();
  DecouplingResult dres;
  for (int attempt = 0;; ++attempt) {
    try {
      dres = run_decoupling(prog, dec);
      break;
    } catch (const GridTooShort& err) {
      if (attempt >= 8) throw;
      dec.k_max *= 2;
      if (log)
        *log << "# grid too short (" << err.what() << "); retrying with k_max = "
             << dec.k_max << "\n";
    }
  }
  out.t_d = seconds_since(t0);

  const double naive = run_naive(prog, {}, cfg.threads);

  t0 = std::chrono::steady_clock::now();
  const BendersResult bres = run_benders(prog, cfg.gap_tol, 500, {}, cfg.threads);
  out.t_b = seconds_since(t0);
  if (!bres.converged && log)
    *log << "# benders hit the iteration cap (gap " << bres.final_gap << ")\n";

  const double scale = std::abs(ext.objective);
  out.ngap = (ext.objective - naive) / scale * 100.0;
  out.dgap = std::abs(ext.objective - dres.z_hat) / scale * 100.0;
  return out;
}

}  // namespace detail

inline std::vector<BenchmarkRecord> run_benchmark(const BenchConfig& cfg,
                                                  std::ostream* log = nullptr) {
  if (cfg.runs < 1) throw std::invalid_argument("run_benchmark: runs must be >= 1");
  if (cfg.n_values.empty() || cfg.h_values.empty())
    throw std::invalid_argument("run_benchmark: empty grid");

  std::vector<BenchmarkRecord> records;
  std::uint64_t cell_index = 0;
  for (const Index n : cfg.n_values) {
    StochasticProgram shared;
    if (cfg.fixed_first_stage) {
      GeneratorConfig gen;
      gen.m1 = cfg.m1;
      gen.n1 = n;
      gen.m2 = cfg.m2;
      gen.n2 = n;
      gen.h_magnitude = cfg.h_values.front();
      gen.num_scenarios = cfg.num_scenarios;
      gen.seed = cfg.seed_base;
      shared = generate_gaussian_instance(gen);
    }
    for (const double h : cfg.h_values) {
      BenchmarkRecord rec;
      rec.m1 = cfg.m1;
      rec.n1 = n;
      rec.m2 = cfg.m2;
      rec.n2 = n;
      rec.h_magnitude = h;
      rec.seed_base = cfg.seed_base;
      if (log) *log << "# cell n1=" << n << " h=" << h << "\n";

      const auto run_with_resampling = [&](int run_index,
                                           detail::RunOutcome& out) -> bool {
        std::uint64_t seed = SubstreamRng::derive_seed(
            cfg.seed_base, (cell_index << 24) + static_cast<std::uint64_t>(run_index));
        for (int consecutive = 0; consecutive < cfg.max_consecutive_resamples;
             ++consecutive) {
          try {
            out = detail::bench_single_run(
                cfg, n, h, seed, cfg.fixed_first_stage ? &shared : nullptr, log);
            return true;
          } catch (const SolverError& err) {
            ++rec.resample_events;
            if (log)
              *log << "# resample (run " << run_index << ", seed " << seed
                   << "): " << err.what() << "\n";
            ++seed;
          }
        }
        return false;
      };

      // Warm-up pass on the first run's instance; timings discarded.
      detail::RunOutcome warm;
      bool cell_ok = run_with_resampling(0, warm);
      rec.resample_events = 0;

      if (cell_ok) {
        for (int r = 0; r < cfg.runs; ++r) {
          detail::RunOutcome out;
          if (!run_with_resampling(r, out)) {
            cell_ok = false;
            break;
          }
          rec.ngap_pct += out.ngap;
          rec.dgap_pct += out.dgap;
          rec.t_extensive_s += out.t_e;
          rec.t_decouple_s += out.t_d;
          rec.t_benders_s += out.t_b;
          ++rec.runs;
        }
      }

      if (cell_ok && rec.runs > 0) {
        rec.ngap_pct /= rec.runs;
        rec.dgap_pct /= rec.runs;
        rec.t_extensive_s /= rec.runs;
        rec.t_decouple_s /= rec.runs;
        rec.t_benders_s /= rec.runs;
      } else {
        rec.aborted = true;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rec.ngap_pct = rec.dgap_pct = nan;
        rec.t_extensive_s = rec.t_decouple_s = rec.t_benders_s = nan;
        if (log)
          *log << "# cell aborted after " << cfg.max_consecutive_resamples
               << " consecutive resamples\n";
      }
      records.push_back(rec);
      ++cell_index;
    }
  }
  return records;
}

namespace detail {

inline std::string shortest_real(double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_real(const std::string& field, const std::string& what) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ParseError("CSV field '" + what + "' is not a number: '" + field + "'");
  return v;
}

inline long long parse_int(const std::string& field, const std::string& what) {
  long long v = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ParseError("CSV field '" + what + "' is not an integer: '" + field + "'");
  return v;
}

}  // namespace detail

inline constexpr const char* kBenchCsvHeader =
    "m1,n1,m2,n2,h,Ngap,Dgap,t_e,t_d,t_b,runs,resamples";

inline void write_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records) {
  out << kBenchCsvHeader << "\n";
  for (const auto& r : records) {
    out << r.m1 << ',' << r.n1 << ',' << r.m2 << ',' << r.n2 << ','
        << detail::shortest_real(r.h_magnitude) << ','
        << detail::shortest_real(r.ngap_pct) << ','
        << detail::shortest_real(r.dgap_pct) << ','
        << detail::shortest_real(r.t_extensive_s) << ','
        << detail::shortest_real(r.t_decouple_s) << ','
        << detail::shortest_real(r.t_benders_s) << ',' << r.runs << ','
        << r.resample_events << "\n";
  }
}

inline std::vector<BenchmarkRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kBenchCsvHeader)
    throw ParseError("CSV header mismatch: got '" + line + "'");

  std::vector<BenchmarkRecord> records;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 12)
      throw ParseError("CSV line " + std::to_string(lineno) + " has " +
                       std::to_string(fields.size()) + " fields, expected 12");
    BenchmarkRecord r;
    r.m1 = detail::parse_int(fields[0], "m1");
    r.n1 = detail::parse_int(fields[1], "n1");
    r.m2 = detail::parse_int(fields[2], "m2");
    r.n2 = detail::parse_int(fields[3], "n2");
    r.h_magnitude = detail::parse_real(fields[4], "h");
    r.ngap_pct = detail::parse_real(fields[5], "Ngap");
    r.dgap_pct = detail::parse_real(fields[6], "Dgap");
    r.t_extensive_s = detail::parse_real(fields[7], "t_e");
    r.t_decouple_s = detail::parse_real(fields[8], "t_d");
    r.t_benders_s = detail::parse_real(fields[9], "t_b");
    r.runs = static_cast<int>(detail::parse_int(fields[10], "runs"));
    r.resample_events = static_cast<int>(detail::parse_int(fields[11], "resamples"));
    r.aborted = std::isnan(r.ngap_pct);
    records.push_back(r);
  }
  return records;
}

/// Human-oriented view of the same records.  Gap columns are deterministic
/// in the seed; time columns are wall-clock and vary between invocations.
inline void write_table(std::ostream& out, const std::vector<BenchmarkRecord>& records) {
  out << "  m1   n1   m2   n2    h     Ngap%    Dgap%      t_e      t_d      t_b  runs  resamples\n";
  for (const auto& r : records) {
    std::ostringstream row;
    row << std::setw(4) << r.m1 << ' ' << std::setw(4) << r.n1 << ' ' << std::setw(4)
        << r.m2 << ' ' << std::setw(4) << r.n2 << ' ' << std::setw(4)
        << std::setprecision(3) << r.h_magnitude;
    row << std::fixed;
    if (r.aborted) {
      row << "  aborted after repeated assumption violations";
    } else {
      row << ' ' << std::setw(8) << std::setprecision(2) << r.ngap_pct << ' '
          << std::setw(8) << std::setprecision(2) << r.dgap_pct << ' ' << std::setw(8)
          << std::setprecision(3) << r.t_extensive_s << ' ' << std::setw(8)
          << r.t_decouple_s << ' ' << std::setw(8) << r.t_benders_s << ' '
          << std::setw(5) << r.runs << ' ' << std::setw(10) << r.resample_events;
    }
    out << row.str() << "\n";
  }
  out << "(times are wall-clock seconds and vary between invocations; gaps are seed-deterministic)\n";
}

}  // namespace stodec
