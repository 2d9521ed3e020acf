#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

#include "quidd/gates.hpp"
#include "quidd/oracle.hpp"

namespace quidd {

/// How the inversion about the mean is applied to a state diagram.
enum class DiffusionMode {
  /// 2 * mean - v, with the mean taken by a weighted sum over the diagram.
  mean_inversion,
  /// matvec with the diffusion() gate diagram.
  matrix,
};

struct GroverParams {
  /// Overrides the oracle's exact model count when choosing R.
  std::optional<std::uint64_t> marked_count;
  /// Defaults to optimal_iterations(N, M).
  std::optional<std::uint64_t> iterations;
  std::uint64_t seed = 0;
  std::uint64_t shots = 1;
  DiffusionMode diffusion = DiffusionMode::mean_inversion;
  /// Collect garbage after every iteration. Frees every diagram of the
  /// manager except the oracle, the diffusion gate, the state and any
  /// diagram registered with GroverSearch::keep.
  bool collect_garbage = true;
};

struct TracePoint {
  std::uint64_t iteration = 0;
  Amplitude marked_amplitude;
  Amplitude unmarked_amplitude;
  double success_probability = 0.0;
  double norm_squared = 0.0;
  std::size_t live_internal_nodes = 0;
  NodeCount state_nodes;

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct GroverRun {
  GroverParams params;
  unsigned qubits = 0;
  std::uint64_t search_space = 0;  // N
  std::uint64_t marked_count = 0;  // M used for R
  std::uint64_t iterations = 0;    // R
  std::vector<TracePoint> trace;   // t = 0 .. R
  std::uint64_t queries = 0;
  std::chrono::nanoseconds wall_time{0};
  std::vector<std::uint64_t> outcomes;
  std::size_t peak_internal_nodes = 0;
  bool no_solution = false;

  double final_success_probability() const {
    return trace.empty() ? 0.0 : trace.back().success_probability;
  }
};

// ---- closed forms ---------------------------------------------------------

/// sin^2((2t + 1) theta) with theta = arcsin(sqrt(M / N)).
inline double grover_success_probability(std::uint64_t n, std::uint64_t m, std::uint64_t t) {
  const double theta = std::asin(std::sqrt(double(m) / double(n)));
  const double s = std::sin(double(2 * t + 1) * theta);
  return s * s;
}

/// floor(pi / (4 arcsin(sqrt(M/N)))), moved to an adjacent count when that
/// one has strictly higher closed-form success probability.
inline std::uint64_t optimal_iterations(std::uint64_t n, std::uint64_t m) {
  if (m == 0) throw NoSolution("Grover search is undefined with no marked items");
  if (n == 0 || m > n) throw InvalidSize("need 1 <= M <= N");
  const double theta = std::asin(std::sqrt(double(m) / double(n)));
  const auto base = std::uint64_t(std::floor(std::numbers::pi / (4.0 * theta)));
  std::uint64_t best = base;
  double best_p = grover_success_probability(n, m, base);
  for (std::uint64_t cand : {base + 1, base == 0 ? base : base - 1}) {
    const double p = grover_success_probability(n, m, cand);
    if (p > best_p) {
      best = cand;
      best_p = p;
    }
  }
  return best;
}

// ---- state preparation and measurement ------------------------------------

/// H^k |0...0>: the constant vector 1/sqrt(2^k).
inline Diagram initialize_state(Manager& m, unsigned k) {
  return matvec(m, hadamard_all(m, k), basis_state(m, k, 0));
}

/// 2 * mean(v) - v on every entry.
inline Diagram invert_about_mean(Manager& m, const Diagram& v) {
  const double n = std::ldexp(1.0, int(v.qubits()));
  const Amplitude twice_mean = 2.0 * entry_sum(m, v) / n;
  return add(m, m.constant(twice_mean, v.space), scalar_mul(m, -1.0, v));
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

/// Samples index x with probability |v(x)|^2 / ||v||^2 by walking the diagram
/// top-down with subtree probability masses. Does not modify the state.
inline std::uint64_t measure(const Manager& m, const Diagram& v, std::mt19937_64& rng) {
  if (v.space.kind != SpaceKind::vector) throw SpaceMismatch("measure needs a state vector");
  const VarSpace space = v.space;
  const unsigned k = v.qubits();
  std::unordered_map<std::uint32_t, double> memo;
  auto level = [&](NodeRef r) { return space.level_of(m.var(r)); };
  // Mass below r, over levels level(r) .. k-1.
  std::function<double(NodeRef)> mass = [&](NodeRef r) -> double {
    if (m.is_terminal(r)) return std::norm(m.value(r));
    if (auto it = memo.find(r.index); it != memo.end()) return it->second;
    const unsigned l = level(r);
    const double s = mass(m.low(r)) * std::ldexp(1.0, int(level(m.low(r)) - l - 1)) +
                     mass(m.high(r)) * std::ldexp(1.0, int(level(m.high(r)) - l - 1));
    memo.emplace(r.index, s);
    return s;
  };
  std::uint64_t index = 0;
  NodeRef r = v.root;
  for (unsigned q = 0; q < k; ++q) {
    bool bit = false;
    if (!m.is_terminal(r) && m.var(r) == VarSpace::row_var(q)) {
      const double m0 = mass(m.low(r)) * std::ldexp(1.0, int(level(m.low(r)) - q - 1));
      const double m1 = mass(m.high(r)) * std::ldexp(1.0, int(level(m.high(r)) - q - 1));
      const double total = m0 + m1;
      bit = total > 0.0 ? unit_uniform(rng) * total >= m0 : unit_uniform(rng) >= 0.5;
      r = bit ? m.high(r) : m.low(r);
    } else {
      bit = unit_uniform(rng) >= 0.5;
    }
    index = (index << 1) | std::uint64_t(bit);
  }
  return index;
}

// ---- the search -----------------------------------------------------------

/// Grover's search over one oracle. Counts every oracle application.
class GroverSearch {
 public:
  GroverSearch(Manager& m, Oracle oracle, DiffusionMode mode = DiffusionMode::mean_inversion)
      : m_(m), oracle_(std::move(oracle)), mode_(mode) {
    if (mode_ == DiffusionMode::matrix) diffusion_ = diffusion(m_, oracle_.qubits);
  }

  const Oracle& oracle() const { return oracle_; }
  std::uint64_t queries() const { return queries_; }

  /// Protects `d` from the per-iteration garbage collection in run().
  void keep(const Diagram& d) { kept_.push_back(d.root); }

  Diagram initial_state() { return initialize_state(m_, oracle_.qubits); }

  Diagram diffuse(const Diagram& v) {
    if (mode_ == DiffusionMode::matrix) return matvec(m_, *diffusion_, v);
    return invert_about_mean(m_, v);
  }

  /// Oracle then inversion about the mean; exactly one query.
  Diagram iterate(const Diagram& v) {
    ++queries_;
    return diffuse(apply_oracle(m_, oracle_, v));
  }

  GroverRun run(const GroverParams& params) {
    GroverRun out;
    out.params = params;
    out.qubits = oracle_.qubits;
    out.search_space = std::uint64_t{1} << oracle_.qubits;
    out.marked_count = params.marked_count.value_or(oracle_.marked_count);
    out.no_solution = oracle_.marked_count == 0;
    if (params.iterations) {
      out.iterations = *params.iterations;
    } else {
      out.iterations =
          out.marked_count == 0 ? 0 : optimal_iterations(out.search_space, out.marked_count);
    }
    const auto marked = find_marked(m_, oracle_);
    const auto unmarked = find_unmarked(m_, oracle_);
    std::mt19937_64 rng(params.seed);
    const std::uint64_t queries_before = queries_;

    if (params.collect_garbage) collect({});
    m_.reset_peak();
    const auto start = std::chrono::steady_clock::now();

    Diagram state = initial_state();
    out.trace.reserve(out.iterations + 1);
    out.trace.push_back(observe(0, state, marked, unmarked));
    for (std::uint64_t t = 1; t <= out.iterations; ++t) {
      state = iterate(state);
      if (params.collect_garbage) collect(state);
      out.trace.push_back(observe(t, state, marked, unmarked));
    }
    out.outcomes.reserve(params.shots);
    for (std::uint64_t s = 0; s < params.shots; ++s) out.outcomes.push_back(measure(m_, state, rng));

    out.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::steady_clock::now() - start);
    out.queries = queries_ - queries_before;
    out.peak_internal_nodes = m_.stats().peak_internal;
    return out;
  }

 private:
  void collect(std::optional<Diagram> state) {
    std::vector<NodeRef> roots = kept_;
    roots.push_back(oracle_.phase.root);
    if (diffusion_) roots.push_back(diffusion_->root);
    if (state) roots.push_back(state->root);
    m_.collect_garbage(std::span<const NodeRef>(roots));
  }

  TracePoint observe(std::uint64_t t, const Diagram& state, std::optional<std::uint64_t> marked,
                     std::optional<std::uint64_t> unmarked) {
    TracePoint p;
    p.iteration = t;
    p.marked_amplitude = marked ? entry_at(m_, state, *marked) : Amplitude{};
    p.unmarked_amplitude = unmarked ? entry_at(m_, state, *unmarked) : Amplitude{};
    p.norm_squared = norm_squared(m_, state);
    // sum over marked |v|^2 = (||v||^2 - <v|O v>) / 2 for a +-1 phase O.
    const Amplitude signed_mass = inner_product(m_, state, apply_oracle(m_, oracle_, state));
    p.success_probability = std::clamp((p.norm_squared - signed_mass.real()) / 2.0, 0.0, 1.0);
    p.live_internal_nodes = m_.stats().live_internal;
    p.state_nodes = count_nodes(m_, state);
    return p;
  }

  Manager& m_;
  Oracle oracle_;
  DiffusionMode mode_;
  std::optional<Diagram> diffusion_;
  std::vector<NodeRef> kept_;
  std::uint64_t queries_ = 0;
};

inline Diagram grover_iterate(Manager& m, const Oracle& o, const Diagram& v,
                              DiffusionMode mode = DiffusionMode::mean_inversion) {
  if (mode == DiffusionMode::matrix) return matvec(m, diffusion(m, o.qubits), apply_oracle(m, o, v));
  return invert_about_mean(m, apply_oracle(m, o, v));
}

inline GroverRun run_grover(Manager& m, const Oracle& o, const GroverParams& params = {}) {
  GroverSearch search(m, o, params.diffusion);
  return search.run(params);
}

// ---- trace analysis -------------------------------------------------------

struct TraceReport {
  std::vector<double> success;           // per iteration t = 0 .. R
  std::optional<std::uint64_t> first_peak;
  bool declines_after_first_peak = false;
  std::vector<std::uint64_t> local_maxima;
};

/// Local maxima of the success series. An endpoint counts when it is strictly
/// above its only neighbour; an interior point when it is at least its
/// predecessor and strictly above its successor.
inline TraceReport amplitude_trace_report(const GroverRun& run) {
  TraceReport r;
  for (const auto& p : run.trace) r.success.push_back(p.success_probability);
  const auto& s = r.success;
  const std::size_t n = s.size();
  for (std::size_t t = 0; t < n; ++t) {
    const bool above_prev = t == 0 || s[t] >= s[t - 1];
    const bool above_next = t + 1 == n ? (t > 0 && s[t] > s[t - 1]) : s[t] > s[t + 1];
    if (t == 0 && n > 1 && !(s[0] > s[1])) continue;
    if (above_prev && above_next) r.local_maxima.push_back(t);
  }
  if (!r.local_maxima.empty()) {
    r.first_peak = r.local_maxima.front();
    const std::size_t t = *r.first_peak;
    r.declines_after_first_peak = t + 1 < n && s[t + 1] < s[t];
  }
  return r;
}

}  // namespace quidd
