#pragma once

// Naive 2^k dense linear algebra. This is the brute-force reference the
// diagram algorithms are checked against, so it stays deliberately plain.

#include <cmath>
#include <complex>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "quidd/error.hpp"

namespace quidd::dense {

using Amplitude = std::complex<double>;

inline constexpr unsigned vector_cap = 20;
inline constexpr unsigned matrix_cap = 12;

struct Vector {
  unsigned qubits = 0;
  std::vector<Amplitude> data;

  Vector() = default;
  explicit Vector(unsigned k) : qubits(k) {
    if (k > vector_cap) throw SizeCapExceeded("dense vector with k=" + std::to_string(k));
    data.assign(std::size_t{1} << k, Amplitude{});
  }
  std::size_t size() const { return data.size(); }
  Amplitude& operator[](std::size_t i) { return data[i]; }
  const Amplitude& operator[](std::size_t i) const { return data[i]; }
};

/// Row-major 2^k x 2^k.
struct Matrix {
  unsigned qubits = 0;
  std::vector<Amplitude> data;

  Matrix() = default;
  explicit Matrix(unsigned k) : qubits(k) {
    if (k > matrix_cap) throw SizeCapExceeded("dense matrix with k=" + std::to_string(k));
    data.assign(std::size_t{1} << (2 * k), Amplitude{});
  }
  std::size_t dim() const { return std::size_t{1} << qubits; }
  Amplitude& operator()(std::size_t r, std::size_t c) { return data[r * dim() + c]; }
  const Amplitude& operator()(std::size_t r, std::size_t c) const { return data[r * dim() + c]; }
};

inline Vector from_entries(unsigned k, const std::vector<Amplitude>& entries) {
  Vector v(k);
  if (entries.size() != v.size()) throw InvalidSize("dense vector entry count");
  v.data = entries;
  return v;
}

inline Vector matvec(const Matrix& g, const Vector& v) {
  if (g.qubits != v.qubits) throw SpaceMismatch("dense matvec");
  Vector out(v.qubits);
  for (std::size_t r = 0; r < g.dim(); ++r) {
    Amplitude s{};
    for (std::size_t c = 0; c < g.dim(); ++c) s += g(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.qubits != b.qubits) throw SpaceMismatch("dense matmul");
  Matrix out(a.qubits);
  const std::size_t n = a.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Amplitude s{};
      for (std::size_t l = 0; l < n; ++l) s += a(i, l) * b(l, j);
      out(i, j) = s;
    }
  return out;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.qubits + b.qubits);
  const std::size_t nb = b.dim();
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      for (std::size_t r = 0; r < nb; ++r)
        for (std::size_t c = 0; c < nb; ++c) out(i * nb + r, j * nb + c) = a(i, j) * b(r, c);
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.qubits + b.qubits);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

inline Vector add(const Vector& a, const Vector& b) {
  Vector out(a.qubits);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Vector hadamard_product(const Vector& a, const Vector& b) {
  Vector out(a.qubits);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

inline Amplitude dot(const Vector& u, const Vector& v) {
  Amplitude s{};
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

inline double norm_squared(const Vector& v) { return dot(v, v).real(); }

inline Matrix adjoint(const Matrix& a) {
  Matrix out(a.qubits);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

inline Matrix identity(unsigned k) {
  Matrix out(k);
  for (std::size_t i = 0; i < out.dim(); ++i) out(i, i) = 1.0;
  return out;
}

inline Matrix hadamard() {
  Matrix h(1);
  const double s = 1.0 / std::sqrt(2.0);
  h(0, 0) = s;
  h(0, 1) = s;
  h(1, 0) = s;
  h(1, 1) = -s;
  return h;
}

/// H^k as a Kronecker power.
inline Matrix hadamard_all(unsigned k) {
  Matrix out = hadamard();
  for (unsigned i = 1; i < k; ++i) out = kron(out, hadamard());
  return out;
}

inline Matrix diffusion(unsigned k) {
  Matrix out(k);
  const double n = double(out.dim());
  for (std::size_t i = 0; i < out.dim(); ++i)
    for (std::size_t j = 0; j < out.dim(); ++j) out(i, j) = 2.0 / n - (i == j ? 1.0 : 0.0);
  return out;
}

inline Vector uniform(unsigned k) {
  Vector v(k);
  const double a = 1.0 / std::sqrt(double(v.size()));
  for (auto& x : v.data) x = a;
  return v;
}

inline Vector phase_vector(unsigned k, const std::set<std::uint64_t>& marked) {
  Vector v(k);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = marked.count(i) ? -1.0 : 1.0;
  return v;
}

/// Inversion about the mean: each entry a becomes 2 * mean - a.
inline Vector invert_about_mean(const Vector& v) {
  Amplitude mean{};
  for (const auto& a : v.data) mean += a;
  mean /= double(v.size());
  Vector out(v.qubits);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = 2.0 * mean - v[i];
  return out;
}

/// States after 0, 1, ..., iterations Grover iterations from the uniform state.
inline std::vector<Vector> grover(unsigned k, const std::set<std::uint64_t>& marked,
                                  std::uint64_t iterations) {
  std::vector<Vector> states;
  states.reserve(iterations + 1);
  Vector v = uniform(k);
  const Vector phase = phase_vector(k, marked);
  states.push_back(v);
  for (std::uint64_t t = 0; t < iterations; ++t) {
    v = invert_about_mean(hadamard_product(phase, v));
    states.push_back(v);
  }
  return states;
}

inline double success_probability(const Vector& v, const std::set<std::uint64_t>& marked) {
  double p = 0.0;
  for (auto x : marked) p += std::norm(v[x]);
  return p;
}

inline double max_abs_diff(const std::vector<Amplitude>& a, const std::vector<Amplitude>& b) {
  if (a.size() != b.size()) return INFINITY;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace quidd::dense
