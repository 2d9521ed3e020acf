#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "quidd/manager.hpp"

namespace quidd {

enum class BinaryOp { add, mul };

namespace detail {

inline double pow2(int e) { return std::ldexp(1.0, e); }

inline void require_same_space(const Diagram& a, const Diagram& b, const char* op) {
  if (a.space != b.space) {
    throw SpaceMismatch(std::string(op) + ": " + to_string(a.space) + " vs " + to_string(b.space));
  }
}

inline NodeRef apply_rec(Manager& m, BinaryOp op, NodeRef a, NodeRef b) {
  const bool ta = m.is_terminal(a);
  const bool tb = m.is_terminal(b);
  if (ta && tb) {
    return m.terminal(op == BinaryOp::add ? m.value(a) + m.value(b) : m.value(a) * m.value(b));
  }
  const NodeRef zero = m.zero();
  if (op == BinaryOp::add) {
    if (a == zero) return b;
    if (b == zero) return a;
  } else {
    if (a == zero || b == zero) return zero;
    const NodeRef one = m.one();
    if (a == one) return b;
    if (b == one) return a;
  }
  if (b < a) std::swap(a, b);  // both ops commute

  const OpTag tag = op == BinaryOp::add ? OpTag::add : OpTag::mul;
  if (const NodeRef* hit = m.cache_find(tag, a, b)) return *hit;

  const std::uint32_t v = std::min(m.var(a), m.var(b));
  const auto [a0, a1] = m.cofactors(a, v);
  const auto [b0, b1] = m.cofactors(b, v);
  const NodeRef lo = apply_rec(m, op, a0, b0);
  const NodeRef hi = apply_rec(m, op, a1, b1);
  const NodeRef r = m.make_node(v, lo, hi);
  m.cache_store(tag, a, b, 0, r);
  return r;
}

inline NodeRef shift_rec(Manager& m, NodeRef a, std::uint32_t offset) {
  if (m.is_terminal(a) || offset == 0) return a;
  if (const NodeRef* hit = m.cache_find(OpTag::shift, a, a, offset)) return *hit;
  const NodeRef lo = shift_rec(m, m.low(a), offset);
  const NodeRef hi = shift_rec(m, m.high(a), offset);
  const NodeRef r = m.make_node(m.var(a) + offset, lo, hi);
  m.cache_store(OpTag::shift, a, a, offset, r);
  return r;
}

// Replaces every terminal t of `a` by t * b. All variables of b follow a's.
inline NodeRef graft_rec(Manager& m, NodeRef a, NodeRef b) {
  if (m.is_terminal(a)) return apply_rec(m, BinaryOp::mul, a, b);
  if (const NodeRef* hit = m.cache_find(OpTag::graft, a, b)) return *hit;
  const NodeRef lo = graft_rec(m, m.low(a), b);
  const NodeRef hi = graft_rec(m, m.high(a), b);
  const NodeRef r = m.make_node(m.var(a), lo, hi);
  m.cache_store(OpTag::graft, a, b, 0, r);
  return r;
}

// Sum of all entries below `r`, counting levels level_of(var(r)) .. levels-1.
inline Amplitude node_sum(Manager& m, NodeRef r, const VarSpace& space) {
  if (m.is_terminal(r)) return m.value(r);
  auto& memo = m.sum_memo();
  const std::uint64_t key = Manager::sum_key(r, space);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const unsigned level = space.level_of(m.var(r));
  const NodeRef lo = m.low(r);
  const NodeRef hi = m.high(r);
  const Amplitude s =
      node_sum(m, lo, space) * pow2(int(space.level_of(m.var(lo))) - int(level) - 1) +
      node_sum(m, hi, space) * pow2(int(space.level_of(m.var(hi))) - int(level) - 1);
  memo.emplace(key, s);
  return s;
}

// Sum of the entries of vector node `v` over levels from..k-1.
inline Amplitude vector_sum_from(Manager& m, NodeRef v, const VarSpace& space, unsigned from) {
  const unsigned lv = space.level_of(m.var(v));
  return node_sum(m, v, space) * pow2(int(lv) - int(from));
}

inline std::uint32_t level_key(unsigned level, unsigned k) { return (k << 16) | level; }

inline NodeRef matvec_rec(Manager& m, NodeRef g, NodeRef v, unsigned level, unsigned k) {
  const VarSpace vspace = VarSpace::vector(k);
  if (m.is_terminal(g)) {
    // Constant block: every output entry is g times the sum of v's block.
    return m.terminal(m.value(g) * vector_sum_from(m, v, vspace, level));
  }
  if (const NodeRef* hit = m.cache_find(OpTag::matvec, g, v, level_key(level, k))) return *hit;
  const std::uint32_t rv = VarSpace::row_var(level);
  const std::uint32_t cv = VarSpace::col_var(level);
  const auto [g0, g1] = m.cofactors(g, rv);
  const auto [g00, g01] = m.cofactors(g0, cv);
  const auto [g10, g11] = m.cofactors(g1, cv);
  const auto [v0, v1] = m.cofactors(v, rv);
  const NodeRef y0 = apply_rec(m, BinaryOp::add, matvec_rec(m, g00, v0, level + 1, k),
                               matvec_rec(m, g01, v1, level + 1, k));
  const NodeRef y1 = apply_rec(m, BinaryOp::add, matvec_rec(m, g10, v0, level + 1, k),
                               matvec_rec(m, g11, v1, level + 1, k));
  const NodeRef r = m.make_node(rv, y0, y1);
  m.cache_store(OpTag::matvec, g, v, level_key(level, k), r);
  return r;
}

inline NodeRef matmat_rec(Manager& m, NodeRef a, NodeRef b, unsigned level, unsigned k) {
  if (m.is_terminal(a) && m.is_terminal(b)) {
    return m.terminal(m.value(a) * m.value(b) * pow2(int(k) - int(level)));
  }
  if (const NodeRef* hit = m.cache_find(OpTag::matmat, a, b, level_key(level, k))) return *hit;
  const std::uint32_t rv = VarSpace::row_var(level);
  const std::uint32_t cv = VarSpace::col_var(level);
  const auto [a0, a1] = m.cofactors(a, rv);
  const auto [a00, a01] = m.cofactors(a0, cv);
  const auto [a10, a11] = m.cofactors(a1, cv);
  const auto [b0, b1] = m.cofactors(b, rv);
  const auto [b00, b01] = m.cofactors(b0, cv);
  const auto [b10, b11] = m.cofactors(b1, cv);
  auto block = [&](NodeRef x0, NodeRef y0, NodeRef x1, NodeRef y1) {
    return apply_rec(m, BinaryOp::add, matmat_rec(m, x0, y0, level + 1, k),
                     matmat_rec(m, x1, y1, level + 1, k));
  };
  const NodeRef c00 = block(a00, b00, a01, b10);
  const NodeRef c01 = block(a00, b01, a01, b11);
  const NodeRef c10 = block(a10, b00, a11, b10);
  const NodeRef c11 = block(a10, b01, a11, b11);
  const NodeRef r = m.make_node(rv, m.make_node(cv, c00, c01), m.make_node(cv, c10, c11));
  m.cache_store(OpTag::matmat, a, b, level_key(level, k), r);
  return r;
}

}  // namespace detail

// ---- node-level primitives ------------------------------------------------

inline NodeRef mk_terminal(Manager& m, Amplitude a) { return m.terminal(a); }

inline NodeRef mk_internal(Manager& m, std::uint32_t var, NodeRef low, NodeRef high) {
  return m.make_node(var, low, high);
}

// ---- elementwise ----------------------------------------------------------

inline Diagram apply(Manager& m, BinaryOp op, const Diagram& a, const Diagram& b) {
  detail::require_same_space(a, b, "apply");
  return {detail::apply_rec(m, op, a.root, b.root), a.space};
}

inline Diagram add(Manager& m, const Diagram& a, const Diagram& b) {
  return apply(m, BinaryOp::add, a, b);
}

inline Diagram mul(Manager& m, const Diagram& a, const Diagram& b) {
  return apply(m, BinaryOp::mul, a, b);
}

inline Diagram scalar_mul(Manager& m, Amplitude s, const Diagram& a) {
  return {detail::apply_rec(m, BinaryOp::mul, m.terminal(s), a.root), a.space};
}

// ---- products -------------------------------------------------------------

/// Kronecker product; a's qubits become the leading (most significant) ones.
inline Diagram tensor(Manager& m, const Diagram& a, const Diagram& b) {
  if (a.space.kind != b.space.kind) {
    throw SpaceMismatch("tensor: " + to_string(a.space) + " vs " + to_string(b.space));
  }
  const unsigned k = a.qubits() + b.qubits();
  const VarSpace space =
      a.space.kind == SpaceKind::vector ? VarSpace::vector(k) : VarSpace::matrix(k);
  const NodeRef shifted = detail::shift_rec(m, b.root, 2 * a.qubits());
  return {detail::graft_rec(m, a.root, shifted), space};
}

inline Diagram matvec(Manager& m, const Diagram& g, const Diagram& v) {
  if (g.space.kind != SpaceKind::matrix || v.space.kind != SpaceKind::vector ||
      g.qubits() != v.qubits()) {
    throw SpaceMismatch("matvec: " + to_string(g.space) + " times " + to_string(v.space));
  }
  return {detail::matvec_rec(m, g.root, v.root, 0, v.qubits()), v.space};
}

inline Diagram matmat(Manager& m, const Diagram& a, const Diagram& b) {
  if (a.space.kind != SpaceKind::matrix || a.space != b.space) {
    throw SpaceMismatch("matmat: " + to_string(a.space) + " times " + to_string(b.space));
  }
  return {detail::matmat_rec(m, a.root, b.root, 0, a.qubits()), a.space};
}

/// <u|v>, conjugating u. Works for matrices too (Frobenius product).
inline Amplitude inner_product(const Manager& m, const Diagram& u, const Diagram& v) {
  detail::require_same_space(u, v, "inner_product");
  const VarSpace space = u.space;
  std::unordered_map<std::uint64_t, Amplitude> memo;
  auto level = [&](NodeRef r) { return space.level_of(m.var(r)); };
  // Sum over levels min(level(a), level(b)) .. levels-1.
  std::function<Amplitude(NodeRef, NodeRef)> rec = [&](NodeRef a, NodeRef b) -> Amplitude {
    if (m.is_terminal(a) && m.is_terminal(b)) return std::conj(m.value(a)) * m.value(b);
    const std::uint64_t key = (std::uint64_t{a.index} << 32) | b.index;
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const unsigned top = std::min(level(a), level(b));
    const std::uint32_t v = space.var_at(top);
    const auto [a0, a1] = m.cofactors(a, v);
    const auto [b0, b1] = m.cofactors(b, v);
    const unsigned l0 = std::min(level(a0), level(b0));
    const unsigned l1 = std::min(level(a1), level(b1));
    const Amplitude s = rec(a0, b0) * detail::pow2(int(l0) - int(top) - 1) +
                        rec(a1, b1) * detail::pow2(int(l1) - int(top) - 1);
    memo.emplace(key, s);
    return s;
  };
  const unsigned top = std::min(level(u.root), level(v.root));
  return rec(u.root, v.root) * detail::pow2(int(top));
}

inline double norm_squared(const Manager& m, const Diagram& v) {
  return inner_product(m, v, v).real();
}

/// Sum of all represented entries.
inline Amplitude entry_sum(Manager& m, const Diagram& d) {
  return detail::node_sum(m, d.root, d.space) *
         detail::pow2(int(d.space.level_of(m.var(d.root))));
}

// ---- entries --------------------------------------------------------------

/// Vector entry at `index`; qubit 0 is the most significant bit.
inline Amplitude entry_at(const Manager& m, const Diagram& v, std::uint64_t index) {
  if (v.space.kind != SpaceKind::vector) throw SpaceMismatch("entry_at(index) needs a vector");
  const unsigned k = v.qubits();
  if (k < 64 && index >> k) throw IndexOutOfRange(std::to_string(index) + " for k=" + std::to_string(k));
  NodeRef r = v.root;
  while (!m.is_terminal(r)) {
    const unsigned q = m.var(r) / 2;
    r = ((index >> (k - 1 - q)) & 1U) ? m.high(r) : m.low(r);
  }
  return m.value(r);
}

/// Vector entry addressed by a bit string such as "01101" (qubit 0 first).
inline Amplitude entry_at(const Manager& m, const Diagram& v, std::string_view bits) {
  if (bits.size() != v.qubits()) {
    throw IndexOutOfRange("bit string of length " + std::to_string(bits.size()) + " for k=" +
                          std::to_string(v.qubits()));
  }
  std::uint64_t index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw IndexOutOfRange("bit string must contain only 0 and 1");
    index = (index << 1) | std::uint64_t(c == '1');
  }
  return entry_at(m, v, index);
}

inline Amplitude entry_at(const Manager& m, const Diagram& g, std::uint64_t row, std::uint64_t col) {
  if (g.space.kind != SpaceKind::matrix) throw SpaceMismatch("entry_at(row, col) needs a matrix");
  const unsigned k = g.qubits();
  if (k < 64 && ((row >> k) || (col >> k))) throw IndexOutOfRange("matrix index");
  NodeRef r = g.root;
  while (!m.is_terminal(r)) {
    const std::uint32_t v = m.var(r);
    const unsigned q = v / 2;
    const std::uint64_t idx = (v % 2 == 0) ? row : col;
    r = ((idx >> (k - 1 - q)) & 1U) ? m.high(r) : m.low(r);
  }
  return m.value(r);
}

// ---- structure ------------------------------------------------------------

inline NodeCount count_nodes(const Manager& m, NodeRef root) {
  std::unordered_set<std::uint32_t> seen;
  std::vector<NodeRef> stack{root};
  NodeCount c;
  while (!stack.empty()) {
    const NodeRef r = stack.back();
    stack.pop_back();
    if (!seen.insert(r.index).second) continue;
    if (m.is_terminal(r)) {
      ++c.terminal;
    } else {
      ++c.internal;
      stack.push_back(m.low(r));
      stack.push_back(m.high(r));
    }
  }
  return c;
}

inline NodeCount count_nodes(const Manager& m, const Diagram& d) { return count_nodes(m, d.root); }

/// Number of entries whose value satisfies `pred`, by weighted path counting.
inline std::uint64_t count_where(const Manager& m, const Diagram& d,
                                 const std::function<bool(Amplitude)>& pred) {
  const VarSpace space = d.space;
  std::unordered_map<std::uint32_t, std::uint64_t> memo;
  std::function<std::uint64_t(NodeRef)> rec = [&](NodeRef r) -> std::uint64_t {
    if (m.is_terminal(r)) return pred(m.value(r)) ? 1 : 0;
    if (auto it = memo.find(r.index); it != memo.end()) return it->second;
    const unsigned level = space.level_of(m.var(r));
    auto weighted = [&](NodeRef c) {
      return rec(c) << (space.level_of(m.var(c)) - level - 1);
    };
    const std::uint64_t n = weighted(m.low(r)) + weighted(m.high(r));
    memo.emplace(r.index, n);
    return n;
  };
  return rec(d.root) << space.level_of(m.var(d.root));
}

/// Checks the ordered and reduced properties on every reachable node and that
/// all variables belong to the space. Returns an empty string when valid.
inline std::string check_structure(const Manager& m, const Diagram& d) {
  std::unordered_set<std::uint32_t> seen;
  std::vector<NodeRef> stack{d.root};
  while (!stack.empty()) {
    const NodeRef r = stack.back();
    stack.pop_back();
    if (!seen.insert(r.index).second) continue;
    if (!m.is_live(r)) return "dead node " + std::to_string(r.index);
    if (m.is_terminal(r)) continue;
    const std::uint32_t v = m.var(r);
    if (d.space.kind == SpaceKind::vector && v % 2 != 0) return "column variable in vector";
    if (v >= 2 * d.qubits()) return "variable " + std::to_string(v) + " outside space";
    if (m.low(r) == m.high(r)) return "redundant node " + std::to_string(r.index);
    if (v >= m.var(m.low(r)) || v >= m.var(m.high(r))) return "order violated at " + std::to_string(r.index);
    stack.push_back(m.low(r));
    stack.push_back(m.high(r));
  }
  return {};
}

// ---- dense bridge ---------------------------------------------------------

/// Builds a diagram from 2^k entries (vector) or 2^k x 2^k row-major entries
/// (matrix).
inline Diagram from_dense(Manager& m, std::span<const Amplitude> entries, VarSpace space) {
  const unsigned k = space.qubits;
  const unsigned bits = space.levels();
  if (bits >= 40) throw SizeCapExceeded("from_dense with " + std::to_string(bits) + " index bits");
  if (entries.size() != (std::size_t{1} << bits)) {
    throw InvalidSize("expected " + std::to_string(std::size_t{1} << bits) + " entries, got " +
                      std::to_string(entries.size()));
  }
  const std::uint64_t dim = std::uint64_t{1} << k;
  std::function<NodeRef(unsigned, std::uint64_t, std::uint64_t)> build =
      [&](unsigned level, std::uint64_t row, std::uint64_t col) -> NodeRef {
    if (level == bits) {
      return m.terminal(space.kind == SpaceKind::vector ? entries[row] : entries[row * dim + col]);
    }
    const std::uint32_t v = space.var_at(level);
    const unsigned q = v / 2;
    const std::uint64_t bit = std::uint64_t{1} << (k - 1 - q);
    NodeRef lo;
    NodeRef hi;
    if (v % 2 == 0) {
      lo = build(level + 1, row, col);
      hi = build(level + 1, row | bit, col);
    } else {
      lo = build(level + 1, row, col);
      hi = build(level + 1, row, col | bit);
    }
    return m.make_node(v, lo, hi);
  };
  return {build(0, 0, 0), space};
}

inline std::vector<Amplitude> to_dense(const Manager& m, const Diagram& d) {
  const unsigned bits = d.space.levels();
  if (bits > m.dense_cap()) {
    throw SizeCapExceeded(std::to_string(bits) + " index bits exceed cap " +
                          std::to_string(m.dense_cap()));
  }
  std::vector<Amplitude> out(std::size_t{1} << bits);
  if (d.space.kind == SpaceKind::vector) {
    for (std::uint64_t i = 0; i < out.size(); ++i) out[i] = entry_at(m, d, i);
  } else {
    const std::uint64_t dim = std::uint64_t{1} << d.qubits();
    for (std::uint64_t r = 0; r < dim; ++r)
      for (std::uint64_t c = 0; c < dim; ++c) out[r * dim + c] = entry_at(m, d, r, c);
  }
  return out;
}

/// Plain-text adjacency listing, children before parents:
///   T <id> <re> <im>             terminal
///   N <id> <var> <low> <high>    internal node
///   R <id> <kind> <k>            root, last line
inline void dump(const Manager& m, const Diagram& d, std::ostream& os) {
  std::unordered_set<std::uint32_t> done;
  std::function<void(NodeRef)> visit = [&](NodeRef r) {
    if (!done.insert(r.index).second) return;
    if (m.is_terminal(r)) {
      const auto old = os.precision(17);
      os << "T " << r.index << ' ' << m.value(r).real() << ' ' << m.value(r).imag() << '\n';
      os.precision(old);
      return;
    }
    visit(m.low(r));
    visit(m.high(r));
    os << "N " << r.index << ' ' << m.var(r) << ' ' << m.low(r).index << ' ' << m.high(r).index
       << '\n';
  };
  visit(d.root);
  os << "R " << d.root.index << ' ' << (d.space.kind == SpaceKind::vector ? "vector" : "matrix")
     << ' ' << d.qubits() << '\n';
}

}  // namespace quidd
