#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "quidd/cnf.hpp"
#include "quidd/grover.hpp"

namespace quidd {

/// Stream seed for trial `trial` of an experiment seeded with `seed`
/// (splitmix64 finaliser).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct QueryLedger {
  std::uint64_t queries = 0;
  std::optional<std::uint64_t> found;

  bool exhausted() const { return !found.has_value(); }
};

// ---- unstructured search --------------------------------------------------

/// Queries indices in `order` until the predicate holds.
template <class Pred>
QueryLedger deterministic_scan(Pred&& pred, std::span<const std::uint64_t> order) {
  QueryLedger ledger;
  for (std::uint64_t x : order) {
    ++ledger.queries;
    if (pred(x)) {
      ledger.found = x;
      break;
    }
  }
  return ledger;
}

/// Scan in natural order 0, 1, ..., n - 1.
template <class Pred>
QueryLedger deterministic_scan(Pred&& pred, std::uint64_t n) {
  QueryLedger ledger;
  for (std::uint64_t x = 0; x < n; ++x) {
    ++ledger.queries;
    if (pred(x)) {
      ledger.found = x;
      break;
    }
  }
  return ledger;
}

enum class Sampling { with_replacement, without_replacement };

/// Random probing. Without replacement never exceeds n queries; with
/// replacement stops after `max_queries` (default 64 n) misses.
template <class Pred>
QueryLedger randomized_search(Pred&& pred, std::uint64_t n, Sampling mode, std::uint64_t seed,
                              std::optional<std::uint64_t> max_queries = std::nullopt) {
  QueryLedger ledger;
  if (n == 0) return ledger;
  std::mt19937_64 rng(seed);
  if (mode == Sampling::with_replacement) {
    const std::uint64_t cap = max_queries.value_or(64 * n);
    std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
    while (ledger.queries < cap) {
      const std::uint64_t x = pick(rng);
      ++ledger.queries;
      if (pred(x)) {
        ledger.found = x;
        break;
      }
    }
    return ledger;
  }
  // Lazy Fisher-Yates: only displaced slots are stored.
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;
  auto slot = [&](std::uint64_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  const std::uint64_t cap = std::min(n, max_queries.value_or(n));
  for (std::uint64_t i = 0; i < cap; ++i) {
    std::uniform_int_distribution<std::uint64_t> pick(i, n - 1);
    const std::uint64_t j = pick(rng);
    const std::uint64_t x = slot(j);
    swapped[j] = slot(i);
    ++ledger.queries;
    if (pred(x)) {
      ledger.found = x;
      break;
    }
  }
  return ledger;
}

// ---- Schoening's random walk for 3-SAT ------------------------------------

struct WalkConfig {
  CnfFormula formula;
  std::uint64_t flips_per_trial = 0;  // 0 means 3k
  std::uint64_t max_restarts = 1'000'000;
  std::uint64_t seed = 0;
};

struct WalkResult {
  std::optional<std::vector<bool>> assignment;  // assignment[v - 1]
  std::uint64_t restarts = 0;                   // restarts started
  std::uint64_t flips = 0;

  bool solved() const { return assignment.has_value(); }
};

namespace detail {

// Incremental walk state: per-clause count of true literals and the set of
// unsatisfied clauses with O(1) insert/erase.
class WalkState {
 public:
  explicit WalkState(const CnfFormula& f) : f_(f), occurrences_(f.num_vars + 1) {
    for (std::uint32_t c = 0; c < f.clauses.size(); ++c) {
      for (Literal lit : f.clauses[c]) occurrences_[std::size_t(std::abs(lit))].push_back({c, lit > 0});
    }
    true_count_.resize(f.clauses.size());
    position_.resize(f.clauses.size());
    values_.resize(f.num_vars);
  }

  void randomize(std::mt19937_64& rng) {
    for (std::size_t v = 0; v < values_.size(); ++v) values_[v] = (rng() >> 63) != 0;
    unsat_.clear();
    for (std::uint32_t c = 0; c < f_.clauses.size(); ++c) {
      std::uint32_t n = 0;
      for (Literal lit : f_.clauses[c]) n += values_[std::size_t(std::abs(lit)) - 1] == (lit > 0);
      true_count_[c] = n;
      if (n == 0) push(c);
    }
  }

  bool satisfied() const { return unsat_.empty(); }
  std::size_t unsatisfied() const { return unsat_.size(); }
  std::uint32_t unsat_clause(std::size_t i) const { return unsat_[i]; }
  const std::vector<bool>& values() const { return values_; }

  void flip(unsigned var) {
    const bool now = !values_[var - 1];
    values_[var - 1] = now;
    for (const auto& [c, positive] : occurrences_[var]) {
      if (now == positive) {
        if (true_count_[c]++ == 0) erase(c);
      } else {
        if (--true_count_[c] == 0) push(c);
      }
    }
  }

 private:
  struct Occurrence {
    std::uint32_t clause;
    bool positive;
  };

  void push(std::uint32_t c) {
    position_[c] = std::uint32_t(unsat_.size());
    unsat_.push_back(c);
  }
  void erase(std::uint32_t c) {
    const std::uint32_t last = unsat_.back();
    unsat_[position_[c]] = last;
    position_[last] = position_[c];
    unsat_.pop_back();
  }

  const CnfFormula& f_;
  std::vector<std::vector<Occurrence>> occurrences_;
  std::vector<std::uint32_t> true_count_;
  std::vector<std::uint32_t> position_;
  std::vector<std::uint32_t> unsat_;
  std::vector<bool> values_;
};

inline void require_3cnf(const CnfFormula& f) {
  f.validate();
  if (f.max_clause_width() > 3) throw FormatError("random walk needs clauses of at most 3 literals");
}

// One restart: fresh random assignment, then up to `flips` steps.
inline bool walk_once(WalkState& s, const CnfFormula& f, std::uint64_t flips, std::mt19937_64& rng,
                      std::uint64_t& flips_used) {
  s.randomize(rng);
  for (std::uint64_t step = 0; step < flips && !s.satisfied(); ++step) {
    const std::uint32_t c =
        s.unsat_clause(std::uniform_int_distribution<std::size_t>(0, s.unsatisfied() - 1)(rng));
    const Clause& clause = f.clauses[c];
    const Literal lit = clause[std::uniform_int_distribution<std::size_t>(0, clause.size() - 1)(rng)];
    s.flip(unsigned(std::abs(lit)));
    ++flips_used;
  }
  return s.satisfied();
}

}  // namespace detail

/// Restarts from a uniform random assignment, then flips a random variable
/// of a random unsatisfied clause up to 3k times. Any returned assignment has
/// been checked against the formula.
inline WalkResult schoening_walk(const WalkConfig& cfg) {
  detail::require_3cnf(cfg.formula);
  const CnfFormula& f = cfg.formula;
  const std::uint64_t flips = cfg.flips_per_trial ? cfg.flips_per_trial : 3ull * f.num_vars;
  WalkResult result;
  detail::WalkState state(f);
  std::mt19937_64 rng(cfg.seed);
  while (result.restarts < cfg.max_restarts) {
    ++result.restarts;
    if (detail::walk_once(state, f, flips, rng, result.flips)) {
      if (!f.satisfied_by(state.values())) {
        throw std::logic_error("walk reported a non-satisfying assignment");
      }
      result.assignment = state.values();
      break;
    }
  }
  return result;
}

/// Fraction of independent restarts (3k flips each unless configured) that
/// reach a satisfying assignment.
inline double restart_success_rate(const WalkConfig& cfg, std::uint64_t restarts) {
  detail::require_3cnf(cfg.formula);
  const CnfFormula& f = cfg.formula;
  const std::uint64_t flips = cfg.flips_per_trial ? cfg.flips_per_trial : 3ull * f.num_vars;
  detail::WalkState state(f);
  std::mt19937_64 rng(cfg.seed);
  std::uint64_t wins = 0;
  std::uint64_t used = 0;
  for (std::uint64_t i = 0; i < restarts; ++i) {
    if (detail::walk_once(state, f, flips, rng, used) && f.satisfied_by(state.values())) ++wins;
  }
  return restarts ? double(wins) / double(restarts) : 0.0;
}

// ---- comparison table -----------------------------------------------------

/// Per-k expected query or step counts. Eppstein's 3-colouring bound (1.37^k)
/// is quoted for reference only and has no column.
struct CrossoverRow {
  unsigned k = 0;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t grover_queries = 0;   // optimal_iterations(N, M)
  double deterministic_mean = 0.0;    // (N + 1) / (M + 1), random marked positions
  std::uint64_t deterministic_worst = 0;  // N - M + 1
  double randomized_mean = 0.0;       // N / M, sampling with replacement
  double schoening_steps = 0.0;       // 3k (4/3)^k flip budget of the 3-SAT walk
};

inline std::vector<CrossoverRow> crossover_table(unsigned k_min, unsigned k_max, std::uint64_t m) {
  if (k_min == 0 || k_min > k_max || k_max > VarSpace::max_qubits) throw InvalidSize("k range");
  std::vector<CrossoverRow> rows;
  for (unsigned k = k_min; k <= k_max; ++k) {
    const std::uint64_t n = std::uint64_t{1} << k;
    const std::uint64_t mk = std::min(m, n);
    CrossoverRow row;
    row.k = k;
    row.n = n;
    row.m = mk;
    row.grover_queries = mk == 0 ? 0 : optimal_iterations(n, mk);
    row.deterministic_mean = mk == 0 ? double(n) : (double(n) + 1.0) / (double(mk) + 1.0);
    row.deterministic_worst = mk == 0 ? n : n - mk + 1;
    row.randomized_mean = mk == 0 ? INFINITY : double(n) / double(mk);
    row.schoening_steps = 3.0 * k * std::pow(4.0 / 3.0, double(k));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace quidd
