#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "quidd/bench.hpp"

using namespace quidd;
using namespace quidd::bench;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string drop_column(const std::string& text, std::size_t col) {
  std::string out;
  for (auto row : parse_csv(text)) {
    row.erase(row.begin() + std::ptrdiff_t(col));
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += '\n';
  }
  return out;
}

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << contents;
  return path;
}

}  // namespace

TEST(Csv, TwelveSignificantDigits) {
  EXPECT_EQ(fmt(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(fmt(524288.5), "524288.5");
  EXPECT_EQ(fmt(2.0), "2");
  EXPECT_EQ(fmt(1e-20), "1e-20");
}

TEST(Csv, HeaderAndRows) {
  std::ostringstream os;
  CsvWriter csv(os, {"a", "b", "c"});
  csv.row(1, 0.5, std::string("x"));
  EXPECT_EQ(os.str(), "a,b,c\n1,0.5,x\n");
}

TEST(Config, ParseExperiment) {
  EXPECT_EQ(parse_experiment("scaling"), Experiment::scaling);
  EXPECT_EQ(parse_experiment("repeat_until_all_found"), Experiment::repeat_all);
  EXPECT_EQ(parse_experiment("repeat_all"), Experiment::repeat_all);
  EXPECT_FALSE(parse_experiment("plot"));
}

TEST(Config, Validation) {
  ExperimentConfig c;
  c.k_min = 5;
  c.k_max = 4;
  EXPECT_THROW(c.validate(), InvalidSize);
  c.k_max = 6;
  c.reps = 0;
  EXPECT_THROW(c.validate(), InvalidSize);
  c.reps = 1;
  c.k_min = 0;
  EXPECT_THROW(c.validate(), InvalidSize);
  c.k_min = 1;
  c.marked_file = "a";
  c.cnf_file = "b";
  EXPECT_THROW(c.validate(), FormatError);
}

TEST(Fit, ExactLine) {
  const LineFit f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.correlation, 1.0, 1e-12);
  for (double r : f.residuals) EXPECT_NEAR(r, 0.0, 1e-12);
}

TEST(Fit, RecoversSyntheticGrowth) {
  std::vector<ScalingSample> samples;
  for (unsigned k = 10; k <= 20; ++k) {
    samples.push_back({k, 0, std::uint64_t(std::llround(50.0 * k * std::pow(1.414, k))), 9 * k, 0});
  }
  const ScalingFit fit = fit_scaling(samples);
  ASSERT_TRUE(fit.growth_base);
  EXPECT_NEAR(*fit.growth_base, 1.414, 1e-6);
  EXPECT_NEAR(*fit.c_ns, 50.0, 1e-3);
  EXPECT_EQ(fit.residuals.size(), 11u);
  EXPECT_NEAR(fit.nodes_vs_k.slope, 9.0, 1e-12);
  EXPECT_NEAR(fit.nodes_vs_k.correlation, 1.0, 1e-12);
}

TEST(Fit, NeedsFiveDistinctQubitCounts) {
  std::vector<ScalingSample> samples;
  for (unsigned k = 10; k <= 13; ++k) samples.push_back({k, 0, 1000u * k, k, 0});
  samples.push_back({13, 0, 2000, 13, 0});
  EXPECT_FALSE(fit_scaling(samples).growth_base);
}

TEST(Workload, RandomMarkedSet) {
  const auto a = random_marked_set(10, 37, 5);
  EXPECT_EQ(a.size(), 37u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
  EXPECT_EQ(a, random_marked_set(10, 37, 5));
  EXPECT_EQ(random_marked_set(4, 16, 1).size(), 16u);
  EXPECT_THROW(random_marked_set(4, 17, 1), InvalidSize);
}

TEST(Scaling, DeterministicExceptWallTime) {
  ExperimentConfig c;
  c.k_min = 4;
  c.k_max = 9;
  c.seed = 3;
  c.min_sample = std::chrono::nanoseconds(0);
  std::ostringstream a;
  std::ostringstream b;
  const ScalingFit fa = run_scaling(c, a);
  run_scaling(c, b);
  const auto rows = parse_csv(a.str());
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"k", "iterations", "wall_ns", "peak_internal_nodes", "seed"}));
  EXPECT_EQ(drop_column(a.str(), 2), drop_column(b.str(), 2));
  EXPECT_TRUE(fa.growth_base);
  for (const auto& s : fa.samples) EXPECT_EQ(s.iterations, optimal_iterations(std::uint64_t{1} << s.k, 1));
}

TEST(OracleStats, SingleMarkedHasKNodes) {
  ExperimentConfig c;
  c.k_min = 4;
  c.k_max = 24;
  std::ostringstream os;
  const auto rows = run_oracle_stats(c, os);
  ASSERT_EQ(rows.size(), 21u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.internal_nodes, r.k);
    EXPECT_EQ(r.m, 1u);
  }
  EXPECT_EQ(parse_csv(os.str())[0],
            (std::vector<std::string>{"k", "M", "internal_nodes", "terminal_nodes", "compile_ns"}));
}

TEST(OracleStats, DenseSetsOutgrowAnyLine) {
  ExperimentConfig c;
  c.k_min = 8;
  c.k_max = 14;
  c.dense_sets = true;
  std::ostringstream os;
  const auto rows = run_oracle_stats(c, os);
  std::vector<double> ks;
  std::vector<double> nodes;
  for (const auto& r : rows) {
    ks.push_back(r.k);
    nodes.push_back(double(r.internal_nodes));
  }
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GT(rows[i].internal_nodes, rows[i - 1].internal_nodes);
  // Convex growth: the linear fit underestimates both ends.
  const LineFit f = fit_line(ks, nodes);
  EXPECT_GT(f.residuals.front(), 0.0);
  EXPECT_GT(f.residuals.back(), 0.0);
  EXPECT_GT(double(rows.back().internal_nodes) / double(rows[rows.size() - 2].internal_nodes), 1.5);
}

TEST(OracleStats, TautologyCnfFile) {
  const auto path = temp_file("quidd_tautology.cnf", "p cnf 5 0\n");
  ExperimentConfig c;
  c.cnf_file = path.string();
  std::ostringstream os;
  const auto rows = run_oracle_stats(c, os);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].internal_nodes, 0u);
  EXPECT_EQ(rows[0].m, 32u);
  std::filesystem::remove(path);
}

TEST(OracleStats, MarkedFile) {
  const auto path = temp_file("quidd_marked.txt", "# three items\n1\n5\n9\n");
  ExperimentConfig c;
  c.k_min = 4;
  c.k_max = 6;
  c.marked_file = path.string();
  std::ostringstream os;
  const auto rows = run_oracle_stats(c, os);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) EXPECT_EQ(r.m, 3u);
  std::filesystem::remove(path);
}

TEST(Crossover, TwentyQubitRow) {
  ExperimentConfig c;
  c.k_min = 20;
  c.k_max = 20;
  std::ostringstream os;
  run_crossover(c, os);
  const auto rows = parse_csv(os.str());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], "20");
  EXPECT_EQ(rows[1][3], "804");
  EXPECT_EQ(rows[1][4], "524288.5");
}

TEST(Trace, RiseFallRise) {
  ExperimentConfig c;
  c.k_min = 6;
  c.iteration_factor = 3.0;
  std::ostringstream os;
  const GroverRun r = run_trace(c, os);
  EXPECT_EQ(r.iterations, 3 * optimal_iterations(64, 1));
  const auto rows = parse_csv(os.str());
  ASSERT_EQ(rows.size(), r.iterations + 2);
  std::vector<double> p;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    p.push_back(std::stod(rows[i][1]));
    EXPECT_NEAR(std::stod(rows[i][1]), std::stod(rows[i][2]), 1e-9);
  }
  const auto peak = std::max_element(p.begin(), p.begin() + 10) - p.begin();
  EXPECT_GT(p[std::size_t(peak)], 0.99);
  const auto trough = std::min_element(p.begin() + peak, p.end()) - p.begin();
  EXPECT_LT(p[std::size_t(trough)], 0.05);
  EXPECT_GT(*std::max_element(p.begin() + trough, p.end()), 0.9);
}

TEST(RepeatAll, SmallRunIsDeterministic) {
  ExperimentConfig c;
  c.k_min = 5;
  c.reps = 20;
  c.seed = 4;
  std::ostringstream a;
  std::ostringstream b;
  const RepeatSummary s = run_repeat_all(c, a);
  run_repeat_all(c, b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(s.marked, 4u);
  EXPECT_NEAR(s.coupon_collector, 4.0 * (1.0 + 1.0 / 2 + 1.0 / 3 + 1.0 / 4), 1e-12);
  for (auto r : s.repetitions) EXPECT_GE(r, 4u);
  EXPECT_EQ(parse_csv(a.str()).size(), 21u);
}

TEST(RepeatAll, RejectsEmptyMarkedSet) {
  ExperimentConfig c;
  c.k_min = 4;
  c.m = 0;
  std::ostringstream os;
  EXPECT_THROW(run_repeat_all(c, os), NoSolution);
}
