// Experiment driver: Grover runtime scaling, oracle sizes, classical
// crossover tables, amplitude traces and repeat-until-all-found statistics.
// Every experiment writes CSV to --out (or stdout); diagnostics go to stderr.

#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "quidd/quidd.hpp"

namespace {

using quidd::bench::Experiment;
using quidd::bench::ExperimentConfig;
using quidd::bench::fmt;

int run(const ExperimentConfig& cfg, std::ostream& out) {
  switch (cfg.kind) {
    case Experiment::scaling: {
      const auto fit = quidd::bench::run_scaling(cfg, out);
      if (fit.growth_base) {
        std::cerr << "fit: time ~ c*k*b^k with b=" << fmt(*fit.growth_base) << " c=" << fmt(*fit.c_ns)
                  << "ns\n";
        std::cerr << "residuals (log2):";
        for (double r : fit.residuals) std::cerr << ' ' << fmt(r);
        std::cerr << '\n';
      } else {
        std::cerr << "fit: skipped, needs at least 5 distinct k values\n";
      }
      std::cerr << "peak internal nodes vs k: slope=" << fmt(fit.nodes_vs_k.slope)
                << " correlation=" << fmt(fit.nodes_vs_k.correlation) << '\n';
      return 0;
    }
    case Experiment::oracle_stats:
      quidd::bench::run_oracle_stats(cfg, out);
      return 0;
    case Experiment::crossover:
      quidd::bench::run_crossover(cfg, out);
      return 0;
    case Experiment::trace: {
      const auto r = quidd::bench::run_trace(cfg, out);
      const auto report = quidd::amplitude_trace_report(r);
      std::cerr << "iterations=" << r.iterations << " queries=" << r.queries
                << " local maxima=" << report.local_maxima.size() << '\n';
      return 0;
    }
    case Experiment::repeat_all: {
      const auto s = quidd::bench::run_repeat_all(cfg, out);
      std::cerr << "mean repetitions=" << fmt(s.mean_repetitions)
                << " coupon-collector M*H_M=" << fmt(s.coupon_collector)
                << " per-run success=" << fmt(s.per_run_success) << '\n';
      return 0;
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grover search on decision diagrams: benchmark and experiment driver"};
  app.set_version_flag("--version", "bench 1.0");

  std::string experiment;
  ExperimentConfig cfg;
  std::string out_path;
  std::string diffusion = "mean";
  std::uint64_t m = 0;
  std::uint64_t iterations = 0;

  app.add_option("experiment", experiment,
                 "scaling | oracle_stats | crossover | trace | repeat_all")
      ->required()
      ->check(CLI::IsMember({"scaling", "oracle_stats", "crossover", "trace", "repeat_all",
                             "repeat_until_all_found"}));
  app.add_option("--k-min", cfg.k_min, "Smallest qubit count (trace and repeat_all use only this)")
      ->capture_default_str();
  app.add_option("--k-max", cfg.k_max, "Largest qubit count")->capture_default_str();
  auto* marked_opt = app.add_option("--marked", cfg.marked_file,
                                    "Marked-set file: one index per line, '#' comments")
                         ->check(CLI::ExistingFile);
  auto* cnf_opt = app.add_option("--cnf", cfg.cnf_file, "DIMACS CNF predicate")->check(CLI::ExistingFile);
  auto* m_opt = app.add_option("--m", m, "Number of random marked items per k (default 1; repeat_all 4)");
  marked_opt->excludes(cnf_opt)->excludes(m_opt);
  cnf_opt->excludes(m_opt);
  app.add_flag("--dense-sets", cfg.dense_sets, "oracle_stats: mark 2^(k-1) random items");
  app.add_option("--reps", cfg.reps,
                 "Repetitions (scaling: timing samples per k; repeat_all: experiments)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--out", out_path, "CSV output path (default: stdout)");
  auto* iter_opt = app.add_option("--iterations", iterations, "trace: Grover iterations R");
  app.add_option("--iter-factor", cfg.iteration_factor,
                 "trace: R = factor * optimal when --iterations is absent")
      ->capture_default_str();
  app.add_option("--diffusion", diffusion,
                 "mean: invert about the diagram mean; matrix: multiply by the diffusion gate")
      ->check(CLI::IsMember({"mean", "matrix"}))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.kind = *quidd::bench::parse_experiment(experiment);
    if (m_opt->count()) cfg.m = m;
    if (iter_opt->count()) cfg.iterations = iterations;
    cfg.diffusion = diffusion == "matrix" ? quidd::DiffusionMode::matrix
                                          : quidd::DiffusionMode::mean_inversion;
    if (out_path.empty()) return run(cfg, std::cout);
    std::ofstream out(out_path);
    if (!out) throw quidd::Error("cannot open " + out_path + " for writing");
    return run(cfg, out);
  } catch (const std::exception& e) {
    std::cerr << "bench: error: " << e.what() << '\n';
    return 2;
  }
}
