#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "quidd/error.hpp"

namespace quidd {

using Amplitude = std::complex<double>;

/// Handle to a canonical node owned by a Manager. Two handles from the same
/// manager are equal iff they denote the same function.
struct NodeRef {
  std::uint32_t index = 0;

  friend constexpr bool operator==(NodeRef, NodeRef) = default;
  friend constexpr auto operator<=>(NodeRef, NodeRef) = default;
};

inline constexpr std::uint32_t terminal_var = std::numeric_limits<std::uint32_t>::max();

enum class SpaceKind : std::uint8_t { vector, matrix };

/// Index-bit to decision-variable mapping.
///
/// Qubit q (qubit 0 is the most significant index bit) owns row variable 2q
/// and column variable 2q + 1. Vectors use only row variables, so a vector
/// and a matrix over the same qubits share the row ordering
/// r0 < c0 < r1 < c1 < ...
struct VarSpace {
  SpaceKind kind = SpaceKind::vector;
  unsigned qubits = 0;

  static constexpr unsigned max_qubits = 62;

  static VarSpace vector(unsigned k) { return make(SpaceKind::vector, k); }
  static VarSpace matrix(unsigned k) { return make(SpaceKind::matrix, k); }

  static constexpr std::uint32_t row_var(unsigned q) { return 2 * q; }
  static constexpr std::uint32_t col_var(unsigned q) { return 2 * q + 1; }

  /// Number of binary decision levels (k for vectors, 2k for matrices).
  constexpr unsigned levels() const { return kind == SpaceKind::vector ? qubits : 2 * qubits; }

  /// Level of a variable in this space; terminals sit at levels().
  constexpr unsigned level_of(std::uint32_t var) const {
    if (var == terminal_var) return levels();
    return kind == SpaceKind::vector ? var / 2 : var;
  }

  constexpr std::uint32_t var_at(unsigned level) const {
    return kind == SpaceKind::vector ? 2 * level : level;
  }

  friend constexpr bool operator==(const VarSpace&, const VarSpace&) = default;

 private:
  static VarSpace make(SpaceKind kind, unsigned k) {
    if (k > max_qubits) throw InvalidSize("at most " + std::to_string(max_qubits) + " qubits");
    return VarSpace{kind, k};
  }
};

inline std::string to_string(const VarSpace& s) {
  return std::string(s.kind == SpaceKind::vector ? "vector(" : "matrix(") +
         std::to_string(s.qubits) + ")";
}

/// A root node together with the space it is interpreted in. Cheap to copy.
struct Diagram {
  NodeRef root;
  VarSpace space;

  unsigned qubits() const { return space.qubits; }
  friend constexpr bool operator==(const Diagram&, const Diagram&) = default;
};

struct NodeCount {
  std::size_t internal = 0;
  std::size_t terminal = 0;

  std::size_t total() const { return internal + terminal; }
  friend constexpr bool operator==(const NodeCount&, const NodeCount&) = default;
};

struct ManagerStats {
  std::size_t live_internal = 0;
  std::size_t live_terminal = 0;
  std::size_t peak_internal = 0;
  std::size_t peak_terminal = 0;
  std::uint64_t created_internal = 0;
  std::uint64_t cache_lookups = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t gc_runs = 0;
};

// Operation tags for the computed table.
enum class OpTag : std::uint32_t {
  add,
  mul,
  shift,
  graft,
  matvec,
  matmat,
};

namespace detail {

inline void hash_combine(std::size_t& seed, std::uint64_t v) {
  seed ^= std::hash<std::uint64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

struct UniqueKey {
  std::uint32_t var;
  std::uint32_t low;
  std::uint32_t high;
  friend bool operator==(const UniqueKey&, const UniqueKey&) = default;
};

struct UniqueKeyHash {
  std::size_t operator()(const UniqueKey& k) const {
    std::size_t seed = k.var;
    hash_combine(seed, (std::uint64_t{k.low} << 32) | k.high);
    return seed;
  }
};

struct TerminalKey {
  std::uint64_t re;
  std::uint64_t im;
  friend bool operator==(const TerminalKey&, const TerminalKey&) = default;
};

struct TerminalKeyHash {
  std::size_t operator()(const TerminalKey& k) const {
    std::size_t seed = k.re;
    hash_combine(seed, k.im);
    return seed;
  }
};

struct CacheKey {
  OpTag op;
  std::uint32_t a;
  std::uint32_t b;
  std::uint32_t extra;
  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

struct CacheKeyHash {
  std::size_t operator()(const CacheKey& k) const {
    std::size_t seed = static_cast<std::size_t>(k.op);
    hash_combine(seed, (std::uint64_t{k.a} << 32) | k.b);
    hash_combine(seed, k.extra);
    return seed;
  }
};

}  // namespace detail

/// Canonical grid for terminal values.
///
/// Components with magnitude below `zero_band` are zero. Everything else is
/// rounded to `mantissa_bits` significant bits, so the grid spacing is
/// relative to the value and tiny amplitudes (1/sqrt(2^30) and friends) keep
/// their precision.
struct Quantizer {
  static constexpr double zero_band = 1e-12;
  static constexpr int mantissa_bits = 40;

  static double snap(double x) {
    if (std::abs(x) < zero_band) return 0.0;
    int exp = 0;
    const double frac = std::frexp(x, &exp);  // |frac| in [0.5, 1)
    const double scaled = std::nearbyint(std::ldexp(frac, mantissa_bits));
    return std::ldexp(scaled, exp - mantissa_bits);
  }

  static detail::TerminalKey key(Amplitude a) {
    return {std::bit_cast<std::uint64_t>(snap(a.real()) + 0.0),
            std::bit_cast<std::uint64_t>(snap(a.imag()) + 0.0)};
  }

  static bool equal(Amplitude a, Amplitude b) { return key(a) == key(b); }
};

/// Owns every node of a family of diagrams: the unique table, the terminal
/// table and the computed table. Not thread safe; use one manager per thread.
class Manager {
 public:
  struct Node {
    std::uint32_t var = terminal_var;
    NodeRef low;
    NodeRef high;
    Amplitude value;
    bool live = false;
  };

  Manager() {
    unique_.reserve(1024);
    cache_.reserve(1024);
  }

  Manager(const Manager&) = delete;
  Manager& operator=(const Manager&) = delete;

  // ---- construction -------------------------------------------------------

  NodeRef terminal(Amplitude a) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw InvalidAmplitude("non-finite value (" + std::to_string(a.real()) + ", " +
                             std::to_string(a.imag()) + ")");
    }
    const auto key = Quantizer::key(a);
    if (auto it = terminals_.find(key); it != terminals_.end()) return it->second;
    // Representative keeps the first value seen, with the zero band flushed.
    const Amplitude stored{std::abs(a.real()) < Quantizer::zero_band ? 0.0 : a.real(),
                           std::abs(a.imag()) < Quantizer::zero_band ? 0.0 : a.imag()};
    const NodeRef r = allocate(Node{terminal_var, {}, {}, stored, true});
    terminals_.emplace(key, r);
    ++stats_.live_terminal;
    stats_.peak_terminal = std::max(stats_.peak_terminal, stats_.live_terminal);
    return r;
  }

  NodeRef zero() { return terminal(0.0); }
  NodeRef one() { return terminal(1.0); }

  /// Reduced, interned internal node. Returns `low` when both branches agree.
  NodeRef make_node(std::uint32_t var, NodeRef low, NodeRef high) {
    if (low == high) return low;
    if (var >= this->var(low) || var >= this->var(high)) {
      throw VariableOrderError("variable " + std::to_string(var) +
                               " must precede children variables " +
                               std::to_string(this->var(low)) + " and " +
                               std::to_string(this->var(high)));
    }
    const detail::UniqueKey key{var, low.index, high.index};
    if (auto it = unique_.find(key); it != unique_.end()) return it->second;
    const NodeRef r = allocate(Node{var, low, high, {}, true});
    unique_.emplace(key, r);
    ++stats_.live_internal;
    ++stats_.created_internal;
    stats_.peak_internal = std::max(stats_.peak_internal, stats_.live_internal);
    return r;
  }

  Diagram constant(Amplitude a, VarSpace space) { return {terminal(a), space}; }

  // ---- inspection ---------------------------------------------------------

  const Node& node(NodeRef r) const { return nodes_[r.index]; }
  std::uint32_t var(NodeRef r) const { return nodes_[r.index].var; }
  bool is_terminal(NodeRef r) const { return nodes_[r.index].var == terminal_var; }
  Amplitude value(NodeRef r) const { return nodes_[r.index].value; }
  NodeRef low(NodeRef r) const { return nodes_[r.index].low; }
  NodeRef high(NodeRef r) const { return nodes_[r.index].high; }

  /// Shannon cofactors of `r` with respect to `v`.
  std::pair<NodeRef, NodeRef> cofactors(NodeRef r, std::uint32_t v) const {
    const Node& n = nodes_[r.index];
    if (n.var == v) return {n.low, n.high};
    return {r, r};
  }

  bool is_live(NodeRef r) const { return r.index < nodes_.size() && nodes_[r.index].live; }

  // ---- computed table -----------------------------------------------------

  void set_cache_enabled(bool on) {
    cache_enabled_ = on;
    if (!on) cache_.clear();
  }
  bool cache_enabled() const { return cache_enabled_; }

  const NodeRef* cache_find(OpTag op, NodeRef a, NodeRef b, std::uint32_t extra = 0) {
    if (!cache_enabled_) return nullptr;
    ++stats_.cache_lookups;
    auto it = cache_.find({op, a.index, b.index, extra});
    if (it == cache_.end()) return nullptr;
    ++stats_.cache_hits;
    return &it->second;
  }

  void cache_store(OpTag op, NodeRef a, NodeRef b, std::uint32_t extra, NodeRef result) {
    if (cache_enabled_) cache_.insert_or_assign({op, a.index, b.index, extra}, result);
  }

  /// Memo of per-node entry sums used by matvec. The sum of a node covers
  /// the levels from its own level to the bottom of `space`.
  std::unordered_map<std::uint64_t, Amplitude>& sum_memo() { return sums_; }

  static std::uint64_t sum_key(NodeRef r, const VarSpace& space) {
    return std::uint64_t{r.index} | (std::uint64_t{space.levels()} << 32) |
           (std::uint64_t{static_cast<std::uint8_t>(space.kind)} << 48);
  }

  // ---- garbage collection -------------------------------------------------

  /// Frees every node not reachable from `roots`. Handles to freed nodes are
  /// invalidated; the computed table is dropped.
  void collect_garbage(std::span<const NodeRef> roots) {
    std::vector<bool> marked(nodes_.size(), false);
    std::vector<std::uint32_t> stack;
    for (NodeRef r : roots) stack.push_back(r.index);
    while (!stack.empty()) {
      const std::uint32_t i = stack.back();
      stack.pop_back();
      if (marked[i]) continue;
      marked[i] = true;
      const Node& n = nodes_[i];
      if (n.var != terminal_var) {
        stack.push_back(n.low.index);
        stack.push_back(n.high.index);
      }
    }
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
      Node& n = nodes_[i];
      if (!n.live || marked[i]) continue;
      if (n.var == terminal_var) {
        terminals_.erase(Quantizer::key(n.value));
        --stats_.live_terminal;
      } else {
        unique_.erase({n.var, n.low.index, n.high.index});
        --stats_.live_internal;
      }
      n.live = false;
      free_.push_back(i);
    }
    cache_.clear();
    sums_.clear();
    ++stats_.gc_runs;
  }

  void collect_garbage(std::span<const Diagram> roots) {
    std::vector<NodeRef> refs;
    refs.reserve(roots.size());
    for (const Diagram& d : roots) refs.push_back(d.root);
    collect_garbage(std::span<const NodeRef>(refs));
  }

  const ManagerStats& stats() const { return stats_; }

  /// Restarts peak tracking from the current live population.
  void reset_peak() {
    stats_.peak_internal = stats_.live_internal;
    stats_.peak_terminal = stats_.live_terminal;
  }

  /// Largest qubit count to_dense will expand (index bits for matrices count
  /// twice).
  unsigned dense_cap() const { return dense_cap_; }
  void set_dense_cap(unsigned k) { dense_cap_ = k; }

 private:
  NodeRef allocate(Node n) {
    if (!free_.empty()) {
      const std::uint32_t i = free_.back();
      free_.pop_back();
      nodes_[i] = n;
      return NodeRef{i};
    }
    if (nodes_.size() >= std::numeric_limits<std::uint32_t>::max() - 1) {
      throw SizeCapExceeded("node table full");
    }
    nodes_.push_back(n);
    return NodeRef{static_cast<std::uint32_t>(nodes_.size() - 1)};
  }

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> free_;
  std::unordered_map<detail::UniqueKey, NodeRef, detail::UniqueKeyHash> unique_;
  std::unordered_map<detail::TerminalKey, NodeRef, detail::TerminalKeyHash> terminals_;
  std::unordered_map<detail::CacheKey, NodeRef, detail::CacheKeyHash> cache_;
  std::unordered_map<std::uint64_t, Amplitude> sums_;
  bool cache_enabled_ = true;
  unsigned dense_cap_ = 20;
  ManagerStats stats_;
};

}  // namespace quidd
