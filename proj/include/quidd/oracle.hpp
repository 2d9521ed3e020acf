#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "quidd/algebra.hpp"
#include "quidd/cnf.hpp"

namespace quidd {

struct MarkedSet {
  unsigned qubits = 0;
  std::vector<std::uint64_t> indices;  // sorted, unique

  friend bool operator==(const MarkedSet&, const MarkedSet&) = default;
};

using Predicate = std::variant<MarkedSet, CnfFormula>;

inline unsigned predicate_qubits(const Predicate& p) {
  return std::visit(
      [](const auto& x) -> unsigned {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, MarkedSet>) return x.qubits;
        else return x.num_vars;
      },
      p);
}

/// Brute-force evaluation of p(x); the reference for diagram correctness.
inline bool evaluate(const Predicate& p, std::uint64_t x) {
  if (const auto* s = std::get_if<MarkedSet>(&p)) {
    return std::binary_search(s->indices.begin(), s->indices.end(), x);
  }
  return std::get<CnfFormula>(p).satisfied_by(x);
}

/// Diagonal phase oracle: -1 on marked indices, +1 elsewhere, held as a vector
/// and applied by elementwise product.
struct Oracle {
  Diagram phase;
  unsigned qubits = 0;
  std::uint64_t marked_count = 0;
  Predicate provenance;
};

struct OracleSizeReport {
  std::size_t internal_nodes = 0;
  std::size_t terminal_nodes = 0;
  unsigned qubits = 0;
  std::uint64_t marked_count = 0;
};

/// Number of -1 entries of the phase vector, by weighted path counting.
inline std::uint64_t model_count(const Manager& m, const Diagram& phase) {
  return count_where(m, phase, [](Amplitude a) { return a.real() < 0.0; });
}

inline std::uint64_t model_count(const Manager& m, const Oracle& o) {
  return model_count(m, o.phase);
}

namespace detail {

inline NodeRef marked_rec(Manager& m, unsigned k, unsigned q, std::span<const std::uint64_t> idx,
                          NodeRef plus, NodeRef minus) {
  if (idx.empty()) return plus;
  if (idx.size() == (std::uint64_t{1} << (k - q))) return minus;
  const std::uint64_t bit = std::uint64_t{1} << (k - 1 - q);
  const auto split = std::partition_point(idx.begin(), idx.end(),
                                          [bit](std::uint64_t x) { return (x & bit) == 0; });
  const auto n0 = std::size_t(split - idx.begin());
  return m.make_node(VarSpace::row_var(q), marked_rec(m, k, q + 1, idx.first(n0), plus, minus),
                     marked_rec(m, k, q + 1, idx.subspan(n0), plus, minus));
}

// 1 where the clause is satisfied, 0 elsewhere.
inline NodeRef clause_indicator(Manager& m, const Clause& clause) {
  Clause lits = clause;
  std::sort(lits.begin(), lits.end(), [](Literal a, Literal b) {
    return std::abs(a) != std::abs(b) ? std::abs(a) > std::abs(b) : a < b;
  });
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (std::size_t i = 1; i < lits.size(); ++i) {
    if (std::abs(lits[i]) == std::abs(lits[i - 1])) return m.one();  // x or not x
  }
  const NodeRef one = m.one();
  NodeRef chain = m.zero();
  for (Literal lit : lits) {
    const std::uint32_t v = VarSpace::row_var(unsigned(std::abs(lit)) - 1);
    chain = lit > 0 ? m.make_node(v, chain, one) : m.make_node(v, one, chain);
  }
  return chain;
}

}  // namespace detail

inline Oracle compile_marked_set(Manager& m, unsigned k, std::span<const std::uint64_t> indices) {
  if (k == 0 || k > VarSpace::max_qubits) throw InvalidSize("oracle needs 1..62 qubits");
  std::vector<std::uint64_t> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (!sorted.empty() && (sorted.back() >> k) != 0) {
    throw IndexOutOfRange("marked index " + std::to_string(sorted.back()) + " needs more than " +
                          std::to_string(k) + " bits");
  }
  const NodeRef root = detail::marked_rec(m, k, 0, sorted, m.one(), m.terminal(-1.0));
  Oracle o{{root, VarSpace::vector(k)}, k, 0, MarkedSet{k, std::move(sorted)}};
  o.marked_count = model_count(m, o.phase);
  return o;
}

inline Oracle compile_marked_set(Manager& m, unsigned k, std::initializer_list<std::uint64_t> indices) {
  return compile_marked_set(m, k, std::span<const std::uint64_t>(indices.begin(), indices.size()));
}

/// Clause indicators are conjoined in input order, then 1 -> -1 and 0 -> +1.
inline Oracle compile_cnf(Manager& m, const CnfFormula& formula) {
  formula.validate();
  const unsigned k = formula.num_vars;
  if (k == 0 || k > VarSpace::max_qubits) throw InvalidSize("CNF oracle needs 1..62 variables");
  const VarSpace space = VarSpace::vector(k);
  Diagram sat{m.one(), space};
  for (const Clause& c : formula.clauses) {
    sat = mul(m, sat, Diagram{detail::clause_indicator(m, c), space});
  }
  const Diagram phase = add(m, m.constant(1.0, space), scalar_mul(m, -2.0, sat));
  Oracle o{phase, k, 0, formula};
  o.marked_count = model_count(m, o.phase);
  return o;
}

inline Oracle compile(Manager& m, const Predicate& p) {
  if (const auto* s = std::get_if<MarkedSet>(&p)) return compile_marked_set(m, s->qubits, s->indices);
  return compile_cnf(m, std::get<CnfFormula>(p));
}

/// One query: elementwise product of the phase vector with `v`.
inline Diagram apply_oracle(Manager& m, const Oracle& o, const Diagram& v) {
  if (v.space != o.phase.space) {
    throw SpaceMismatch("oracle over " + to_string(o.phase.space) + " applied to " +
                        to_string(v.space));
  }
  return mul(m, o.phase, v);
}

inline OracleSizeReport oracle_size_report(const Manager& m, const Oracle& o) {
  const NodeCount c = count_nodes(m, o.phase);
  return {c.internal, c.terminal, o.qubits, o.marked_count};
}

/// Some index whose entry satisfies `pred` (free bits taken as 0), if any.
inline std::optional<std::uint64_t> find_entry(const Manager& m, const Diagram& v,
                                               const std::function<bool(Amplitude)>& pred) {
  const unsigned k = v.qubits();
  std::unordered_map<std::uint32_t, bool> memo;
  std::function<bool(NodeRef)> reaches = [&](NodeRef r) -> bool {
    if (m.is_terminal(r)) return pred(m.value(r));
    if (auto it = memo.find(r.index); it != memo.end()) return it->second;
    const bool ok = reaches(m.low(r)) || reaches(m.high(r));
    memo.emplace(r.index, ok);
    return ok;
  };
  if (!reaches(v.root)) return std::nullopt;
  std::uint64_t index = 0;
  NodeRef r = v.root;
  while (!m.is_terminal(r)) {
    const unsigned q = m.var(r) / 2;
    if (reaches(m.low(r))) {
      r = m.low(r);
    } else {
      index |= std::uint64_t{1} << (k - 1 - q);
      r = m.high(r);
    }
  }
  return index;
}

inline std::optional<std::uint64_t> find_marked(const Manager& m, const Oracle& o) {
  return find_entry(m, o.phase, [](Amplitude a) { return a.real() < 0.0; });
}

inline std::optional<std::uint64_t> find_unmarked(const Manager& m, const Oracle& o) {
  return find_entry(m, o.phase, [](Amplitude a) { return a.real() > 0.0; });
}

}  // namespace quidd
