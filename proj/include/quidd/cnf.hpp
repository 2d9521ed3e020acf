#pragma once

#include <algorithm>
#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "quidd/error.hpp"

namespace quidd {

/// Literal +v / -v for variable v in [1, num_vars]. Variable v drives qubit
/// v - 1, i.e. bit (num_vars - v) of a search index.
using Literal = int;
using Clause = std::vector<Literal>;

struct CnfFormula {
  unsigned num_vars = 0;
  std::vector<Clause> clauses;

  /// Throws FormatError on empty clauses, zero literals or out-of-range vars.
  void validate() const {
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      if (clauses[i].empty()) throw FormatError("clause " + std::to_string(i + 1) + " is empty");
      for (Literal lit : clauses[i]) {
        if (lit == 0) throw FormatError("literal 0 inside clause " + std::to_string(i + 1));
        if (unsigned(std::abs(lit)) > num_vars) {
          throw FormatError("variable " + std::to_string(std::abs(lit)) + " exceeds " +
                            std::to_string(num_vars));
        }
      }
    }
  }

  std::size_t max_clause_width() const {
    std::size_t w = 0;
    for (const auto& c : clauses) w = std::max(w, c.size());
    return w;
  }

  /// Value of variable `var` under the assignment encoded by `index`.
  bool value(std::uint64_t index, unsigned var) const { return (index >> (num_vars - var)) & 1U; }

  bool satisfied_by(std::uint64_t index) const {
    for (const auto& c : clauses) {
      bool sat = false;
      for (Literal lit : c) {
        if (value(index, unsigned(std::abs(lit))) == (lit > 0)) {
          sat = true;
          break;
        }
      }
      if (!sat) return false;
    }
    return true;
  }

  /// assignment[v - 1] is the value of variable v.
  bool satisfied_by(const std::vector<bool>& assignment) const {
    for (const auto& c : clauses) {
      bool sat = false;
      for (Literal lit : c) {
        if (assignment[std::size_t(std::abs(lit)) - 1] == (lit > 0)) {
          sat = true;
          break;
        }
      }
      if (!sat) return false;
    }
    return true;
  }

  friend bool operator==(const CnfFormula&, const CnfFormula&) = default;
};

inline std::uint64_t assignment_to_index(const std::vector<bool>& assignment) {
  std::uint64_t index = 0;
  for (bool b : assignment) index = (index << 1) | std::uint64_t(b);
  return index;
}

// ---- DIMACS ---------------------------------------------------------------

/// Reads DIMACS CNF. Comment lines start with 'c'; a lone '%' (SATLIB
/// trailer) ends the clause section. The clause count must match the header.
inline CnfFormula parse_dimacs(std::istream& in) {
  CnfFormula f;
  bool have_header = false;
  std::size_t declared_clauses = 0;
  Clause current;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == 'c') continue;
    if (first == "%") break;
    if (first == "p") {
      if (have_header) throw FormatError("line " + std::to_string(line_no) + ": second header");
      std::string fmt;
      long long vars = -1;
      long long ncl = -1;
      if (!(ls >> fmt >> vars >> ncl) || fmt != "cnf" || vars < 0 || ncl < 0) {
        throw FormatError("line " + std::to_string(line_no) + ": expected 'p cnf <vars> <clauses>'");
      }
      f.num_vars = unsigned(vars);
      declared_clauses = std::size_t(ncl);
      have_header = true;
      continue;
    }
    if (!have_header) throw FormatError("line " + std::to_string(line_no) + ": clause before header");
    std::istringstream tokens(line);
    std::string tok;
    while (tokens >> tok) {
      char* end = nullptr;
      const long long lit = std::strtoll(tok.c_str(), &end, 10);
      if (end == tok.c_str() || *end != '\0') {
        throw FormatError("line " + std::to_string(line_no) + ": bad literal '" + tok + "'");
      }
      if (lit == 0) {
        if (current.empty()) throw FormatError("line " + std::to_string(line_no) + ": empty clause");
        f.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (std::llabs(lit) > (long long)f.num_vars) {
        throw FormatError("line " + std::to_string(line_no) + ": variable " +
                          std::to_string(std::llabs(lit)) + " exceeds header count " +
                          std::to_string(f.num_vars));
      }
      current.push_back(Literal(lit));
    }
  }
  if (!have_header) throw FormatError("missing 'p cnf' header");
  if (!current.empty()) throw FormatError("last clause is not terminated by 0");
  if (f.clauses.size() != declared_clauses) {
    throw FormatError("header declares " + std::to_string(declared_clauses) + " clauses, found " +
                      std::to_string(f.clauses.size()));
  }
  return f;
}

inline CnfFormula parse_dimacs_string(const std::string& text) {
  std::istringstream in(text);
  return parse_dimacs(in);
}

inline CnfFormula load_dimacs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return parse_dimacs(in);
}

inline void write_dimacs(const CnfFormula& f, std::ostream& os) {
  os << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) {
    for (Literal lit : c) os << lit << ' ';
    os << "0\n";
  }
}

// ---- marked-set files -----------------------------------------------------

/// One non-negative decimal index per line; '#' lines and blank lines skipped.
inline std::vector<std::uint64_t> parse_marked_set(std::istream& in) {
  std::vector<std::uint64_t> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string tok = line.substr(first, last - first + 1);
    if (tok.find_first_not_of("0123456789") != std::string::npos) {
      throw FormatError("line " + std::to_string(line_no) + ": expected a non-negative index, got '" +
                        tok + "'");
    }
    errno = 0;
    const unsigned long long v = std::strtoull(tok.c_str(), nullptr, 10);
    if (errno == ERANGE) throw FormatError("line " + std::to_string(line_no) + ": index too large");
    out.push_back(v);
  }
  return out;
}

inline std::vector<std::uint64_t> load_marked_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  return parse_marked_set(in);
}

// ---- generators -----------------------------------------------------------

namespace detail {

inline Clause random_clause_vars(unsigned k, unsigned width, std::mt19937_64& rng) {
  std::uniform_int_distribution<unsigned> pick(1, k);
  Clause c;
  while (c.size() < width) {
    const int v = int(pick(rng));
    if (std::find(c.begin(), c.end(), v) == c.end()) c.push_back(v);
  }
  return c;
}

}  // namespace detail

/// Uniform random k-variable CNF with `clauses` clauses of `width` distinct
/// variables each, random signs.
inline CnfFormula random_cnf(unsigned k, std::size_t clauses, unsigned width, std::uint64_t seed) {
  if (width == 0 || width > k) throw InvalidSize("clause width must be in [1, k]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution sign(0.5);
  CnfFormula f{k, {}};
  for (std::size_t i = 0; i < clauses; ++i) {
    Clause c = detail::random_clause_vars(k, width, rng);
    for (auto& lit : c)
      if (sign(rng)) lit = -lit;
    f.clauses.push_back(std::move(c));
  }
  return f;
}

struct PlantedInstance {
  CnfFormula formula;
  std::vector<bool> hidden;  // hidden[v - 1] is variable v
};

/// Random 3-CNF satisfied by a hidden assignment: each clause picks three
/// distinct variables and one of the seven sign patterns the hidden
/// assignment satisfies, uniformly.
inline PlantedInstance planted_3cnf(unsigned k, double ratio, std::uint64_t seed) {
  if (k < 3) throw InvalidSize("planted 3-CNF needs at least 3 variables");
  std::mt19937_64 rng(seed);
  PlantedInstance inst;
  inst.hidden.resize(k);
  std::bernoulli_distribution coin(0.5);
  for (unsigned v = 0; v < k; ++v) inst.hidden[v] = coin(rng);
  inst.formula.num_vars = k;
  const auto count = std::size_t(std::llround(ratio * k));
  std::uniform_int_distribution<int> pattern(0, 7);
  while (inst.formula.clauses.size() < count) {
    Clause c = detail::random_clause_vars(k, 3, rng);
    const int bits = pattern(rng);
    bool sat = false;
    for (std::size_t j = 0; j < 3; ++j) {
      const bool positive = (bits >> j) & 1;
      if (!positive) c[j] = -c[j];
      if (inst.hidden[std::size_t(std::abs(c[j])) - 1] == positive) sat = true;
    }
    if (sat) inst.formula.clauses.push_back(std::move(c));
  }
  return inst;
}

}  // namespace quidd
