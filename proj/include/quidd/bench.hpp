#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "quidd/classical.hpp"
#include "quidd/grover.hpp"
#include "quidd/oracle.hpp"

namespace quidd::bench {

enum class Experiment { scaling, oracle_stats, crossover, trace, repeat_all };

inline std::optional<Experiment> parse_experiment(const std::string& name) {
  if (name == "scaling") return Experiment::scaling;
  if (name == "oracle_stats") return Experiment::oracle_stats;
  if (name == "crossover") return Experiment::crossover;
  if (name == "trace") return Experiment::trace;
  if (name == "repeat_all" || name == "repeat_until_all_found") return Experiment::repeat_all;
  return std::nullopt;
}

struct ExperimentConfig {
  Experiment kind = Experiment::scaling;
  unsigned k_min = 10;
  unsigned k_max = 20;
  std::optional<std::uint64_t> m;
  std::optional<std::string> marked_file;
  std::optional<std::string> cnf_file;
  bool dense_sets = false;  // oracle_stats: M = 2^(k-1) random indices
  std::uint64_t reps = 1;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> iterations;
  double iteration_factor = 1.0;  // trace: R = factor * optimal when iterations unset
  DiffusionMode diffusion = DiffusionMode::mean_inversion;
  /// scaling: runs shorter than this are repeated and averaged.
  std::chrono::nanoseconds min_sample{std::chrono::milliseconds(2)};

  void validate() const {
    if (k_min == 0 || k_min > k_max) throw InvalidSize("k range must be non-empty and start at 1 or more");
    if (k_max > VarSpace::max_qubits) throw InvalidSize("k_max too large");
    if (reps == 0) throw InvalidSize("repetitions must be at least 1");
    if (marked_file && cnf_file) throw FormatError("--marked and --cnf are mutually exclusive");
  }
};

// ---- CSV ------------------------------------------------------------------

/// 12 significant digits.
inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::initializer_list<const char*> header) : os_(os) {
    bool first = true;
    for (const char* h : header) {
      os_ << (first ? "" : ",") << h;
      first = false;
    }
    os_ << '\n';
  }

  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
    os_ << '\n';
  }

 private:
  static std::string cell(double x) { return fmt(x); }
  static std::string cell(const std::string& s) { return s; }
  template <class T>
  static std::string cell(const T& x) requires std::is_integral_v<T> {
    return std::to_string(x);
  }

  std::ostream& os_;
};

// ---- fitting --------------------------------------------------------------

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double correlation = 0.0;
  std::vector<double> residuals;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  f.correlation = (sxx > 0 && syy > 0) ? sxy / std::sqrt(sxx * syy) : 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) f.residuals.push_back(y[i] - (f.intercept + f.slope * x[i]));
  return f;
}

struct ScalingSample {
  unsigned k = 0;
  std::uint64_t iterations = 0;
  std::uint64_t wall_ns = 0;  // median over repetitions
  std::size_t peak_internal_nodes = 0;
  std::uint64_t seed = 0;
};

/// time ~ c * k * b^k, fitted as log2(time / k) = log2 c + k log2 b.
struct ScalingFit {
  std::vector<ScalingSample> samples;
  std::optional<double> c_ns;
  std::optional<double> growth_base;
  std::vector<double> residuals;
  LineFit nodes_vs_k;  // peak internal nodes against k
};

inline ScalingFit fit_scaling(std::vector<ScalingSample> samples) {
  ScalingFit fit;
  fit.samples = std::move(samples);
  std::vector<double> ks, ys, nodes;
  std::unordered_set<unsigned> distinct;
  for (const auto& s : fit.samples) {
    ks.push_back(s.k);
    ys.push_back(std::log2(std::max<double>(1.0, double(s.wall_ns)) / s.k));
    nodes.push_back(double(s.peak_internal_nodes));
    distinct.insert(s.k);
  }
  if (distinct.size() >= 5) {
    const LineFit f = fit_line(ks, ys);
    fit.growth_base = std::exp2(f.slope);
    fit.c_ns = std::exp2(f.intercept);
    fit.residuals = f.residuals;
  }
  if (distinct.size() >= 2) fit.nodes_vs_k = fit_line(ks, nodes);
  return fit;
}

// ---- workloads ------------------------------------------------------------

/// M distinct indices below 2^k, reproducible from seed.
inline std::vector<std::uint64_t> random_marked_set(unsigned k, std::uint64_t m, std::uint64_t seed) {
  const std::uint64_t n = std::uint64_t{1} << k;
  if (m > n) throw InvalidSize("cannot mark " + std::to_string(m) + " of " + std::to_string(n));
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> out;
  if (m * 4 > n) {
    std::vector<std::uint64_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (std::uint64_t i = 0; i < m; ++i) {
      std::swap(all[i], all[std::uniform_int_distribution<std::uint64_t>(i, n - 1)(rng)]);
    }
    out.assign(all.begin(), all.begin() + std::ptrdiff_t(m));
  } else {
    std::unordered_set<std::uint64_t> seen;
    std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
    while (out.size() < m) {
      const std::uint64_t x = pick(rng);
      if (seen.insert(x).second) out.push_back(x);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Oracle for qubit count k according to the config's predicate source.
inline Oracle build_oracle(Manager& mgr, const ExperimentConfig& cfg, unsigned k, std::uint64_t seed,
                           std::uint64_t default_m = 1) {
  if (cfg.cnf_file) return compile_cnf(mgr, load_dimacs(*cfg.cnf_file));
  if (cfg.marked_file) return compile_marked_set(mgr, k, load_marked_set(*cfg.marked_file));
  const std::uint64_t m = cfg.dense_sets ? (std::uint64_t{1} << (k - 1)) : cfg.m.value_or(default_m);
  return compile_marked_set(mgr, k, random_marked_set(k, m, seed));
}

inline std::uint64_t median(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

/// Wall time of the Grover loop (state preparation, R iterations with trace,
/// measurement), oracle compilation excluded. Median over cfg.reps.
inline ScalingFit run_scaling(const ExperimentConfig& cfg, std::ostream& os) {
  cfg.validate();
  CsvWriter csv(os, {"k", "iterations", "wall_ns", "peak_internal_nodes", "seed"});
  std::vector<ScalingSample> samples;
  for (unsigned k = cfg.k_min; k <= cfg.k_max; ++k) {
    const std::uint64_t seed = derive_seed(cfg.seed, k);
    Manager mgr;
    const Oracle oracle = build_oracle(mgr, cfg, k, seed);
    GroverSearch search(mgr, oracle, cfg.diffusion);
    GroverParams params;
    params.seed = seed;
    params.diffusion = cfg.diffusion;
    std::vector<std::uint64_t> times;
    ScalingSample s;
    s.k = k;
    s.seed = seed;
    for (std::uint64_t rep = 0; rep < cfg.reps; ++rep) {
      std::chrono::nanoseconds total{0};
      std::uint64_t runs = 0;
      do {
        const GroverRun run = search.run(params);
        total += run.wall_time;
        ++runs;
        s.iterations = run.iterations;
        s.peak_internal_nodes = run.peak_internal_nodes;
      } while (total < cfg.min_sample);
      times.push_back(std::uint64_t(total.count()) / runs);
    }
    s.wall_ns = median(times);
    csv.row(s.k, s.iterations, s.wall_ns, s.peak_internal_nodes, s.seed);
    samples.push_back(s);
  }
  return fit_scaling(std::move(samples));
}

struct OracleStatsRow {
  unsigned k = 0;
  std::uint64_t m = 0;
  std::size_t internal_nodes = 0;
  std::size_t terminal_nodes = 0;
  std::uint64_t compile_ns = 0;
};

inline std::vector<OracleStatsRow> run_oracle_stats(const ExperimentConfig& cfg, std::ostream& os) {
  cfg.validate();
  CsvWriter csv(os, {"k", "M", "internal_nodes", "terminal_nodes", "compile_ns"});
  std::vector<OracleStatsRow> rows;
  auto emit = [&](Manager& mgr, auto&& compile) {
    const auto start = std::chrono::steady_clock::now();
    const Oracle o = compile();
    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::steady_clock::now() - start);
    const OracleSizeReport r = oracle_size_report(mgr, o);
    rows.push_back({r.qubits, r.marked_count, r.internal_nodes, r.terminal_nodes, std::uint64_t(ns.count())});
    csv.row(r.qubits, r.marked_count, r.internal_nodes, r.terminal_nodes, std::uint64_t(ns.count()));
  };
  if (cfg.cnf_file) {
    const CnfFormula f = load_dimacs(*cfg.cnf_file);
    Manager mgr;
    emit(mgr, [&] { return compile_cnf(mgr, f); });
    return rows;
  }
  for (unsigned k = cfg.k_min; k <= cfg.k_max; ++k) {
    Manager mgr;
    if (cfg.marked_file) {
      const auto indices = load_marked_set(*cfg.marked_file);
      emit(mgr, [&] { return compile_marked_set(mgr, k, indices); });
    } else {
      const std::uint64_t m = cfg.dense_sets ? (std::uint64_t{1} << (k - 1)) : cfg.m.value_or(1);
      const auto indices = random_marked_set(k, m, derive_seed(cfg.seed, k));
      emit(mgr, [&] { return compile_marked_set(mgr, k, indices); });
    }
  }
  return rows;
}

inline std::vector<CrossoverRow> run_crossover(const ExperimentConfig& cfg, std::ostream& os) {
  cfg.validate();
  const auto rows = crossover_table(cfg.k_min, cfg.k_max, cfg.m.value_or(1));
  CsvWriter csv(os, {"k", "N", "M", "grover_queries", "deterministic_mean", "deterministic_worst",
                     "randomized_mean", "schoening_steps"});
  for (const auto& r : rows) {
    csv.row(r.k, r.n, r.m, r.grover_queries, r.deterministic_mean, r.deterministic_worst,
            r.randomized_mean, r.schoening_steps);
  }
  return rows;
}

/// Single run at k_min; R = --iterations, else iteration_factor * optimal.
inline GroverRun run_trace(const ExperimentConfig& cfg, std::ostream& os) {
  cfg.validate();
  const unsigned k = cfg.k_min;
  Manager mgr;
  const Oracle oracle = build_oracle(mgr, cfg, k, derive_seed(cfg.seed, k));
  GroverParams params;
  params.seed = cfg.seed;
  params.diffusion = cfg.diffusion;
  const std::uint64_t n = std::uint64_t{1} << oracle.qubits;
  if (cfg.iterations) {
    params.iterations = cfg.iterations;
  } else if (oracle.marked_count > 0) {
    params.iterations = std::uint64_t(std::llround(cfg.iteration_factor *
                                                   double(optimal_iterations(n, oracle.marked_count))));
  }
  const GroverRun run = run_grover(mgr, oracle, params);
  CsvWriter csv(os, {"t", "success_probability", "closed_form", "marked_amplitude",
                     "unmarked_amplitude", "live_internal_nodes"});
  for (const auto& p : run.trace) {
    const double closed = oracle.marked_count == 0 ? 0.0
                          : grover_success_probability(n, oracle.marked_count, p.iteration);
    csv.row(p.iteration, p.success_probability, closed, p.marked_amplitude.real(),
            p.unmarked_amplitude.real(), p.live_internal_nodes);
  }
  return run;
}

struct RepeatSummary {
  std::uint64_t experiments = 0;
  std::uint64_t marked = 0;
  double mean_repetitions = 0.0;
  double coupon_collector = 0.0;  // M * H_M
  double per_run_success = 0.0;
  std::vector<std::uint64_t> repetitions;
};

/// Repeats full Grover runs with fresh measurements until every marked item
/// has been observed. cfg.reps experiments, oracle at k_min (default M = 4).
inline RepeatSummary run_repeat_all(const ExperimentConfig& cfg, std::ostream& os,
                                    std::uint64_t max_runs = 100000) {
  cfg.validate();
  const unsigned k = cfg.k_min;
  Manager mgr;
  const Oracle oracle = build_oracle(mgr, cfg, k, derive_seed(cfg.seed, k), 4);
  if (oracle.marked_count == 0) throw NoSolution("repeat_all needs at least one marked item");
  GroverSearch search(mgr, oracle, cfg.diffusion);
  RepeatSummary summary;
  summary.marked = oracle.marked_count;
  for (std::uint64_t i = 1; i <= oracle.marked_count; ++i) summary.coupon_collector += 1.0 / double(i);
  summary.coupon_collector *= double(oracle.marked_count);

  CsvWriter csv(os, {"experiment", "repetitions"});
  std::uint64_t total_runs = 0;
  std::uint64_t successes = 0;
  for (std::uint64_t e = 0; e < cfg.reps; ++e) {
    std::unordered_set<std::uint64_t> seen;
    std::uint64_t runs = 0;
    while (seen.size() < oracle.marked_count && runs < max_runs) {
      GroverParams params;
      params.diffusion = cfg.diffusion;
      params.seed = derive_seed(derive_seed(cfg.seed, e), runs);
      const GroverRun run = search.run(params);
      ++runs;
      const std::uint64_t x = run.outcomes.front();
      if (evaluate(oracle.provenance, x)) {
        seen.insert(x);
        ++successes;
      }
    }
    total_runs += runs;
    summary.repetitions.push_back(runs);
    csv.row(e, runs);
  }
  summary.experiments = cfg.reps;
  summary.mean_repetitions = double(total_runs) / double(cfg.reps);
  summary.per_run_success = double(successes) / double(total_runs);
  return summary;
}

}  // namespace quidd::bench
