#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "quidd/algebra.hpp"
#include "quidd/dense.hpp"
#include "quidd/gates.hpp"
#include "test_helpers.hpp"

using namespace quidd;
using quidd::testing::random_entries;

namespace {

constexpr double kTol = 1e-12;

Diagram random_vector(Manager& m, unsigned k, std::mt19937_64& rng, int palette = 0) {
  return from_dense(m, random_entries(std::size_t{1} << k, rng, palette), VarSpace::vector(k));
}

Diagram random_matrix(Manager& m, unsigned k, std::mt19937_64& rng, int palette = 0) {
  return from_dense(m, random_entries(std::size_t{1} << (2 * k), rng, palette), VarSpace::matrix(k));
}

}  // namespace

TEST(Terminal, InterningIsIdempotent) {
  Manager m;
  EXPECT_EQ(mk_terminal(m, 0.0), mk_terminal(m, 0.0));
  EXPECT_EQ(mk_terminal(m, {0.25, -1.5}), mk_terminal(m, {0.25, -1.5}));
  EXPECT_NE(mk_terminal(m, 0.25), mk_terminal(m, 0.5));
}

TEST(Terminal, ValuesInsideOneGridCellShareANode) {
  Manager m;
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_EQ(mk_terminal(m, r), mk_terminal(m, 0.70710678118654752 + 1e-15));
  EXPECT_EQ(mk_terminal(m, 0.0), mk_terminal(m, 3e-13));
  EXPECT_EQ(mk_terminal(m, 0.0), mk_terminal(m, -0.0));
  EXPECT_EQ(m.value(mk_terminal(m, 4e-13)), Amplitude(0.0));
}

TEST(Terminal, RejectsNonFinite) {
  Manager m;
  EXPECT_THROW(mk_terminal(m, std::numeric_limits<double>::quiet_NaN()), InvalidAmplitude);
  EXPECT_THROW(mk_terminal(m, {0.0, std::numeric_limits<double>::infinity()}), InvalidAmplitude);
}

TEST(Internal, RedundantTestIsEliminated) {
  Manager m;
  const NodeRef x = mk_terminal(m, 0.5);
  EXPECT_EQ(mk_internal(m, 0, x, x), x);
}

TEST(Internal, Interning) {
  Manager m;
  const NodeRef t0 = m.zero();
  const NodeRef t1 = m.one();
  EXPECT_EQ(mk_internal(m, 4, t0, t1), mk_internal(m, 4, t0, t1));
  EXPECT_EQ(m.stats().live_internal, 1u);
}

TEST(Internal, RejectsOrderViolation) {
  Manager m;
  const NodeRef child = mk_internal(m, 1, m.zero(), m.one());
  EXPECT_THROW(mk_internal(m, 3, child, m.one()), VariableOrderError);
  EXPECT_THROW(mk_internal(m, 1, child, m.one()), VariableOrderError);
  EXPECT_NO_THROW(mk_internal(m, 0, child, m.one()));
}

TEST(Apply, Constants) {
  Manager m;
  const VarSpace s = VarSpace::vector(3);
  const Diagram sum = add(m, m.constant(0.5, s), m.constant(0.25, s));
  EXPECT_EQ(sum, m.constant(0.75, s));
  EXPECT_EQ(count_nodes(m, sum), (NodeCount{0, 1}));
}

TEST(Apply, MultiplicativeIdentityReturnsSameReference) {
  Manager m;
  std::mt19937_64 rng(1);
  const Diagram a = random_vector(m, 4, rng);
  EXPECT_EQ(mul(m, a, m.constant(1.0, a.space)), a);
}

TEST(Apply, RejectsMismatchedSpaces) {
  Manager m;
  EXPECT_THROW(add(m, m.constant(1.0, VarSpace::vector(2)), m.constant(1.0, VarSpace::vector(3))),
               SpaceMismatch);
  EXPECT_THROW(add(m, m.constant(1.0, VarSpace::vector(2)), m.constant(1.0, VarSpace::matrix(2))),
               SpaceMismatch);
}

TEST(Apply, MatchesDenseElementwise) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    Manager m;
    const unsigned k = 1 + trial % 6;
    const auto ea = random_entries(std::size_t{1} << k, rng, trial % 3 ? 3 : 0);
    const auto eb = random_entries(std::size_t{1} << k, rng, trial % 2 ? 2 : 0);
    const Diagram a = from_dense(m, ea, VarSpace::vector(k));
    const Diagram b = from_dense(m, eb, VarSpace::vector(k));
    const auto s = to_dense(m, add(m, a, b));
    const auto p = to_dense(m, mul(m, a, b));
    for (std::size_t i = 0; i < ea.size(); ++i) {
      EXPECT_LT(std::abs(s[i] - (ea[i] + eb[i])), kTol);
      EXPECT_LT(std::abs(p[i] - ea[i] * eb[i]), kTol);
    }
  }
}

TEST(ScalarMul, IdentityAnnihilatorAndArithmetic) {
  Manager m;
  std::mt19937_64 rng(3);
  const Diagram a = random_vector(m, 3, rng, 3);
  EXPECT_EQ(scalar_mul(m, 1.0, a), a);
  EXPECT_EQ(scalar_mul(m, 0.0, a), m.constant(0.0, a.space));
  const Diagram half = from_dense(m, std::vector<Amplitude>{-0.5, 0.5}, VarSpace::vector(1));
  EXPECT_EQ(scalar_mul(m, 2.0, half), from_dense(m, std::vector<Amplitude>{-1.0, 1.0}, VarSpace::vector(1)));
}

TEST(ScalarMul, NeverGrowsTheDiagram) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    Manager m;
    const Diagram a = random_vector(m, 5, rng, 4);
    const Amplitude s{std::uniform_real_distribution<double>(-2, 2)(rng), 0.3};
    EXPECT_LE(count_nodes(m, scalar_mul(m, s, a)).total(), count_nodes(m, a).total());
  }
}

TEST(Tensor, HadamardPairMatchesDenseKronecker) {
  Manager m;
  const Diagram h = hadamard_all(m, 1);
  const auto got = to_dense(m, tensor(m, h, h));
  const auto want = dense::kron(dense::hadamard(), dense::hadamard());
  EXPECT_LT(dense::max_abs_diff(got, want.data), kTol);
  for (const auto& x : got) EXPECT_NEAR(std::abs(x), 0.5, kTol);
}

TEST(Tensor, IdentityTimesIdentity) {
  Manager m;
  EXPECT_EQ(tensor(m, identity_gate(m, 1), identity_gate(m, 1)), identity_gate(m, 2));
}

TEST(Tensor, Scalars) {
  Manager m;
  const VarSpace s0 = VarSpace::vector(0);
  const Diagram t = tensor(m, m.constant(2.0, s0), m.constant({0.0, 1.5}, s0));
  EXPECT_EQ(t.root, m.terminal({0.0, 3.0}));
}

TEST(Tensor, RandomMatchesDense) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Manager m;
    const unsigned ka = 1 + trial % 3;
    const unsigned kb = 1 + (trial / 3) % 3;
    const auto ea = random_entries(std::size_t{1} << (2 * ka), rng, 3);
    const auto eb = random_entries(std::size_t{1} << (2 * kb), rng);
    const Diagram a = from_dense(m, ea, VarSpace::matrix(ka));
    const Diagram b = from_dense(m, eb, VarSpace::matrix(kb));
    const auto want = dense::kron(quidd::testing::to_dense_matrix(ka, ea),
                                  quidd::testing::to_dense_matrix(kb, eb));
    EXPECT_LT(dense::max_abs_diff(to_dense(m, tensor(m, a, b)), want.data), kTol);

    const auto va = random_entries(std::size_t{1} << ka, rng);
    const auto vb = random_entries(std::size_t{1} << kb, rng, 2);
    const auto vwant = dense::kron(dense::from_entries(ka, va), dense::from_entries(kb, vb));
    const Diagram vt = tensor(m, from_dense(m, va, VarSpace::vector(ka)),
                              from_dense(m, vb, VarSpace::vector(kb)));
    EXPECT_LT(dense::max_abs_diff(to_dense(m, vt), vwant.data), kTol);
  }
}

TEST(Tensor, RejectsKindMismatch) {
  Manager m;
  EXPECT_THROW(tensor(m, identity_gate(m, 1), m.constant(1.0, VarSpace::vector(1))), SpaceMismatch);
}

TEST(Matvec, IdentityReturnsSameReference) {
  Manager m;
  std::mt19937_64 rng(6);
  const Diagram v = random_vector(m, 5, rng);
  EXPECT_EQ(matvec(m, identity_gate(m, 5), v), v);
}

TEST(Matvec, HadamardOnZero) {
  Manager m;
  const Diagram out = matvec(m, hadamard_all(m, 1), basis_state(m, 1, 0));
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(entry_at(m, out, 0).real(), r, kTol);
  EXPECT_NEAR(entry_at(m, out, 1).real(), r, kTol);
}

TEST(Matvec, RandomMatchesDense) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    Manager m;
    const unsigned k = 1 + trial % 6;
    const auto eg = random_entries(std::size_t{1} << (2 * k), rng, trial % 2 ? 3 : 0);
    const auto ev = random_entries(std::size_t{1} << k, rng);
    const auto got = to_dense(m, matvec(m, from_dense(m, eg, VarSpace::matrix(k)),
                                        from_dense(m, ev, VarSpace::vector(k))));
    const auto want = dense::matvec(quidd::testing::to_dense_matrix(k, eg), dense::from_entries(k, ev));
    EXPECT_LT(dense::max_abs_diff(got, want.data), kTol) << "k=" << k;
  }
}

TEST(Matvec, RejectsDimensionMismatch) {
  Manager m;
  EXPECT_THROW(matvec(m, identity_gate(m, 2), m.constant(1.0, VarSpace::vector(3))), SpaceMismatch);
  EXPECT_THROW(matvec(m, m.constant(1.0, VarSpace::vector(2)), m.constant(1.0, VarSpace::vector(2))),
               SpaceMismatch);
}

TEST(Matmat, HadamardIsSelfInverse) {
  Manager m;
  for (unsigned k = 1; k <= 6; ++k) {
    const Diagram h = hadamard_all(m, k);
    EXPECT_EQ(matmat(m, h, h), identity_gate(m, k)) << "k=" << k;
  }
}

TEST(Matmat, IdentityIsNeutral) {
  Manager m;
  std::mt19937_64 rng(8);
  const Diagram b = random_matrix(m, 3, rng, 4);
  EXPECT_EQ(matmat(m, identity_gate(m, 3), b), b);
  EXPECT_EQ(matmat(m, b, identity_gate(m, 3)), b);
}

TEST(Matmat, RandomMatchesDense) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Manager m;
    const unsigned k = 1 + trial % 4;
    const auto ea = random_entries(std::size_t{1} << (2 * k), rng, trial % 2 ? 2 : 0);
    const auto eb = random_entries(std::size_t{1} << (2 * k), rng);
    const auto got = to_dense(m, matmat(m, from_dense(m, ea, VarSpace::matrix(k)),
                                        from_dense(m, eb, VarSpace::matrix(k))));
    const auto want = dense::matmul(quidd::testing::to_dense_matrix(k, ea),
                                    quidd::testing::to_dense_matrix(k, eb));
    EXPECT_LT(dense::max_abs_diff(got, want.data), kTol) << "k=" << k;
  }
}

TEST(InnerProduct, NormAndOrthogonality) {
  Manager m;
  std::mt19937_64 rng(10);
  const auto e = quidd::testing::random_unit_vector(5, rng);
  const Diagram v = from_dense(m, e, VarSpace::vector(5));
  EXPECT_NEAR(inner_product(m, v, v).real(), 1.0, 1e-9);
  EXPECT_EQ(inner_product(m, basis_state(m, 3, 0), basis_state(m, 3, 1)), Amplitude(0.0));
}

TEST(InnerProduct, RandomMatchesDenseDot) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    Manager m;
    const unsigned k = 1 + trial % 6;
    const auto eu = random_entries(std::size_t{1} << k, rng, trial % 3 ? 2 : 0);
    const auto ev = random_entries(std::size_t{1} << k, rng, trial % 2 ? 3 : 0);
    const Amplitude got = inner_product(m, from_dense(m, eu, VarSpace::vector(k)),
                                        from_dense(m, ev, VarSpace::vector(k)));
    const Amplitude want = dense::dot(dense::from_entries(k, eu), dense::from_entries(k, ev));
    EXPECT_LT(std::abs(got - want), kTol);
  }
}

TEST(InnerProduct, ConstantDiagramsWeightSkippedLevels) {
  Manager m;
  const VarSpace s = VarSpace::vector(10);
  EXPECT_NEAR(inner_product(m, m.constant(0.5, s), m.constant(2.0, s)).real(), 1024.0, kTol);
}

TEST(EntryAt, ConstantAndUniform) {
  Manager m;
  const VarSpace s = VarSpace::vector(5);
  EXPECT_EQ(entry_at(m, m.constant({0.3, 0.1}, s), "10110"), Amplitude(0.3, 0.1));
  const Diagram u = matvec(m, hadamard_all(m, 5), basis_state(m, 5, 0));
  EXPECT_NEAR(entry_at(m, u, "01101").real(), 1.0 / std::sqrt(32.0), kTol);
  EXPECT_THROW(entry_at(m, u, "0110"), IndexOutOfRange);
  EXPECT_THROW(entry_at(m, u, std::uint64_t{32}), IndexOutOfRange);
}

TEST(EntryAt, AllEntriesRoundTrip) {
  Manager m;
  std::mt19937_64 rng(12);
  const auto e = random_entries(32, rng, 5);
  const Diagram v = from_dense(m, e, VarSpace::vector(5));
  for (std::uint64_t i = 0; i < 32; ++i) EXPECT_EQ(entry_at(m, v, i), e[i]);
}

TEST(EntryAt, BitStringOrderIsMostSignificantFirst) {
  Manager m;
  const Diagram v = basis_state(m, 5, 0b01101);
  EXPECT_EQ(entry_at(m, v, "01101"), Amplitude(1.0));
  EXPECT_EQ(entry_at(m, v, "10110"), Amplitude(0.0));
}

TEST(CountNodes, Basics) {
  Manager m;
  EXPECT_EQ(count_nodes(m, m.one()), (NodeCount{0, 1}));
  const Diagram u = matvec(m, hadamard_all(m, 7), basis_state(m, 7, 0));
  EXPECT_EQ(count_nodes(m, u), (NodeCount{0, 1}));
  EXPECT_EQ(count_nodes(m, basis_state(m, 5, 9)), (NodeCount{5, 2}));
}

TEST(Dense, FromDenseBasisState) {
  Manager m;
  EXPECT_EQ(from_dense(m, std::vector<Amplitude>{1, 0, 0, 0}, VarSpace::vector(2)), basis_state(m, 2, 0));
}

TEST(Dense, RoundTripIsCanonical) {
  std::mt19937_64 rng(13);
  Manager m;
  for (int palette : {0, 2, 5}) {
    const Diagram v = random_vector(m, 6, rng, palette);
    EXPECT_EQ(from_dense(m, to_dense(m, v), v.space), v);
    const Diagram g = random_matrix(m, 3, rng, palette);
    EXPECT_EQ(from_dense(m, to_dense(m, g), g.space), g);
  }
}

TEST(Dense, SizeCap) {
  Manager m;
  EXPECT_THROW(to_dense(m, m.constant(1.0, VarSpace::vector(21))), SizeCapExceeded);
  EXPECT_THROW(to_dense(m, m.constant(1.0, VarSpace::matrix(11))), SizeCapExceeded);
  m.set_dense_cap(4);
  EXPECT_THROW(to_dense(m, m.constant(1.0, VarSpace::vector(5))), SizeCapExceeded);
  EXPECT_EQ(to_dense(m, m.constant(1.0, VarSpace::vector(4))).size(), 16u);
}

TEST(Canonicity, EqualArraysIffEqualReferences) {
  std::mt19937_64 rng(14);
  Manager m;
  for (int trial = 0; trial < 200; ++trial) {
    const unsigned k = 1 + trial % 4;
    const auto a = random_entries(std::size_t{1} << k, rng, 2);
    auto b = (trial % 2) ? a : random_entries(std::size_t{1} << k, rng, 2);
    const Diagram da = from_dense(m, a, VarSpace::vector(k));
    const Diagram db = from_dense(m, b, VarSpace::vector(k));
    bool equal = true;
    for (std::size_t i = 0; i < a.size(); ++i) equal = equal && Quantizer::equal(a[i], b[i]);
    EXPECT_EQ(equal, da == db);
  }
}

TEST(Canonicity, SameFunctionByDifferentRoutes) {
  Manager m;
  std::mt19937_64 rng(15);
  const Diagram a = random_vector(m, 4, rng, 3);
  const Diagram b = random_vector(m, 4, rng, 3);
  EXPECT_EQ(add(m, a, b), add(m, b, a));
  EXPECT_EQ(scalar_mul(m, 2.0, a), add(m, a, a));
  const Diagram ab = mul(m, a, b);
  EXPECT_EQ(from_dense(m, to_dense(m, ab), ab.space), ab);
}

TEST(Structure, EveryBuiltDiagramIsOrderedAndReduced) {
  std::mt19937_64 rng(16);
  Manager m;
  for (unsigned k = 1; k <= 5; ++k) {
    const Diagram v = random_vector(m, k, rng, 3);
    const Diagram g = random_matrix(m, k, rng, 2);
    for (const Diagram& d : {v, g, matvec(m, g, v), matmat(m, g, g), add(m, v, v),
                             tensor(m, g, hadamard_all(m, 1)), hadamard_all(m, k)}) {
      EXPECT_EQ(check_structure(m, d), "");
    }
  }
}

TEST(Cache, DisabledCacheGivesIdenticalReferences) {
  std::mt19937_64 rng(17);
  Manager m;
  for (unsigned k = 1; k <= 5; ++k) {
    const Diagram v = random_vector(m, k, rng, 3);
    const Diagram g = random_matrix(m, k, rng, 3);
    const Diagram h = hadamard_all(m, k);
    m.set_cache_enabled(true);
    const Diagram r1 = matvec(m, g, v);
    const Diagram r2 = matmat(m, h, g);
    const Diagram r3 = add(m, v, mul(m, v, v));
    const Diagram r4 = tensor(m, g, h);
    m.set_cache_enabled(false);
    EXPECT_EQ(matvec(m, g, v), r1);
    EXPECT_EQ(matmat(m, h, g), r2);
    EXPECT_EQ(add(m, v, mul(m, v, v)), r3);
    EXPECT_EQ(tensor(m, g, h), r4);
    m.set_cache_enabled(true);
  }
}

TEST(Sizes, VectorNodeCountBound) {
  std::mt19937_64 rng(18);
  Manager m;
  for (unsigned k = 1; k <= 8; ++k) {
    const Diagram v = random_vector(m, k, rng);
    EXPECT_LE(count_nodes(m, v).total(), std::size_t{1} << (k + 1));
  }
}

TEST(GarbageCollection, KeepsRootsAndFreesTheRest) {
  Manager m;
  std::mt19937_64 rng(19);
  const Diagram keep = random_vector(m, 6, rng, 3);
  const auto before = to_dense(m, keep);
  for (int i = 0; i < 10; ++i) random_vector(m, 6, rng);
  const std::size_t peak = m.stats().peak_internal;
  m.collect_garbage(std::span<const Diagram>(&keep, 1));
  EXPECT_EQ(m.stats().live_internal, count_nodes(m, keep).internal);
  EXPECT_EQ(m.stats().live_terminal, count_nodes(m, keep).terminal);
  EXPECT_EQ(m.stats().peak_internal, peak);
  EXPECT_EQ(check_structure(m, keep), "");
  EXPECT_EQ(to_dense(m, keep), before);
  // Rebuilding the kept function after a collection yields the same node.
  EXPECT_EQ(from_dense(m, before, keep.space), keep);
}

TEST(Dump, ListsChildrenBeforeParents) {
  Manager m;
  std::ostringstream os;
  dump(m, basis_state(m, 2, 3), os);
  const std::string text = os.str();
  EXPECT_NE(text.find("T "), std::string::npos);
  EXPECT_LT(text.find("T "), text.find("N "));
  EXPECT_EQ(text.rfind("R ", text.size() - 2), text.find("R "));
  EXPECT_NE(text.find("vector 2"), std::string::npos);
}
