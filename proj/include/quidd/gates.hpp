#pragma once

#include <cmath>
#include <string>

#include "quidd/algebra.hpp"

namespace quidd {

enum class GateKind { hadamard, identity, phase_shift_about_zero, diffusion };

struct GateSpec {
  GateKind kind = GateKind::identity;
  unsigned qubits = 1;
};

namespace detail {

inline void require_qubits(unsigned k, const char* gate) {
  if (k == 0) throw InvalidSize(std::string(gate) + " needs at least one qubit");
  if (k > VarSpace::max_qubits) throw InvalidSize(std::string(gate) + ": too many qubits");
}

// Builds a matrix whose entries depend only on whether row == col so far.
// `diag` is the bottom value on the diagonal, `off` everywhere else.
inline NodeRef diagonal_pattern(Manager& m, unsigned k, NodeRef diag, NodeRef off) {
  NodeRef d = diag;
  for (unsigned q = k; q-- > 0;) {
    const std::uint32_t r = VarSpace::row_var(q);
    const std::uint32_t c = VarSpace::col_var(q);
    d = m.make_node(r, m.make_node(c, d, off), m.make_node(c, off, d));
  }
  return d;
}

}  // namespace detail

/// H on every one of k qubits. Entry (x, y) is (-1)^popcount(x & y) / sqrt(2^k).
/// Built level by level from two chains (even and odd parity so far), so
/// the diagram has at most 4k internal nodes.
inline Diagram hadamard_all(Manager& m, unsigned k) {
  detail::require_qubits(k, "hadamard_all");
  const double scale = std::pow(2.0, -0.5 * k);
  NodeRef even = m.terminal(scale);
  NodeRef odd = m.terminal(-scale);
  for (unsigned q = k; q-- > 0;) {
    const std::uint32_t r = VarSpace::row_var(q);
    const std::uint32_t c = VarSpace::col_var(q);
    const NodeRef next_even = m.make_node(r, even, m.make_node(c, even, odd));
    const NodeRef next_odd = m.make_node(r, odd, m.make_node(c, odd, even));
    even = next_even;
    odd = next_odd;
  }
  return {even, VarSpace::matrix(k)};
}

inline Diagram identity_gate(Manager& m, unsigned k) {
  detail::require_qubits(k, "identity_gate");
  return {detail::diagonal_pattern(m, k, m.one(), m.zero()), VarSpace::matrix(k)};
}

/// 2|0><0| - I: +1 at (0, 0), -1 elsewhere on the diagonal.
inline Diagram phase_shift_about_zero(Manager& m, unsigned k) {
  detail::require_qubits(k, "phase_shift_about_zero");
  const NodeRef zero = m.zero();
  // `at_zero` tracks an all-zero prefix; after the first 1 bit the rest is -I.
  NodeRef at_zero = m.one();
  NodeRef minus_identity = m.terminal(-1.0);
  for (unsigned q = k; q-- > 0;) {
    const std::uint32_t r = VarSpace::row_var(q);
    const std::uint32_t c = VarSpace::col_var(q);
    at_zero = m.make_node(r, m.make_node(c, at_zero, zero), m.make_node(c, zero, minus_identity));
    minus_identity = m.make_node(r, m.make_node(c, minus_identity, zero),
                                 m.make_node(c, zero, minus_identity));
  }
  return {at_zero, VarSpace::matrix(k)};
}

/// Diagonal of phase_shift_about_zero as a vector: +1 at index 0, -1 elsewhere.
/// Exactly k internal nodes.
inline Diagram phase_shift_about_zero_diagonal(Manager& m, unsigned k) {
  detail::require_qubits(k, "phase_shift_about_zero_diagonal");
  const NodeRef minus = m.terminal(-1.0);
  NodeRef d = m.one();
  for (unsigned q = k; q-- > 0;) d = m.make_node(VarSpace::row_var(q), d, minus);
  return {d, VarSpace::vector(k)};
}

/// Inversion about the mean, 2|psi><psi| - I for the uniform |psi>.
/// Diagonal entries 2/2^k - 1, off-diagonal 2/2^k; 3k internal nodes.
inline Diagram diffusion(Manager& m, unsigned k) {
  detail::require_qubits(k, "diffusion");
  const double off = std::ldexp(2.0, -int(k));
  return {detail::diagonal_pattern(m, k, m.terminal(off - 1.0), m.terminal(off)),
          VarSpace::matrix(k)};
}

/// The same operator assembled as H^k (2|0><0| - I) H^k by two matrix
/// products. Kept as an independent construction for cross-checking.
inline Diagram diffusion_composed(Manager& m, unsigned k) {
  const Diagram h = hadamard_all(m, k);
  return matmat(m, h, matmat(m, phase_shift_about_zero(m, k), h));
}

inline Diagram make_gate(Manager& m, const GateSpec& spec) {
  switch (spec.kind) {
    case GateKind::hadamard: return hadamard_all(m, spec.qubits);
    case GateKind::identity: return identity_gate(m, spec.qubits);
    case GateKind::phase_shift_about_zero: return phase_shift_about_zero(m, spec.qubits);
    case GateKind::diffusion: return diffusion(m, spec.qubits);
  }
  throw InvalidSize("unknown gate kind");
}

/// Computational basis state |index>.
inline Diagram basis_state(Manager& m, unsigned k, std::uint64_t index) {
  if (k < 64 && index >> k) throw IndexOutOfRange(std::to_string(index) + " for k=" + std::to_string(k));
  const NodeRef zero = m.zero();
  NodeRef d = m.one();
  for (unsigned q = k; q-- > 0;) {
    const bool bit = (index >> (k - 1 - q)) & 1U;
    d = bit ? m.make_node(VarSpace::row_var(q), zero, d) : m.make_node(VarSpace::row_var(q), d, zero);
  }
  return {d, VarSpace::vector(k)};
}

}  // namespace quidd
