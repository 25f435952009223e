#include <gtest/gtest.h>

#include <set>

#include "lshape/group.hpp"
#include "lshape/random.hpp"
#include "oracles.hpp"

using namespace lshape;

TEST(PrimeField, RejectsEvenAndComposite) {
  EXPECT_THROW(PrimeField(2), std::invalid_argument);
  EXPECT_THROW(PrimeField(9), std::invalid_argument);
  EXPECT_THROW(PrimeField(5, true), std::invalid_argument);
  EXPECT_NO_THROW(PrimeField(11, true));
}

TEST(PrimeField, InversesAndHalf) {
  for (int p : {3, 5, 7, 13}) {
    PrimeField f(p);
    for (Residue a = 1; a < p; ++a) EXPECT_EQ(f.mul(a, f.inverse(a)), 1);
    EXPECT_EQ(f.mul(2, f.inverse_of_two()), 1);
    EXPECT_EQ(f.reduce(-1), p - 1);
    EXPECT_THROW(f.inverse(0), std::domain_error);
  }
}

TEST(IndexSpace, EncodingIsLittleEndian) {
  for (int p : {3, 5}) {
    for (int m = 1; m <= 3; ++m) {
      IndexSpace space(p, m);
      for (Index i = 0; i < space.size(); ++i) {
        const auto d = oracle::digits(i, p, m);
        for (int k = 0; k < m; ++k) EXPECT_EQ(space.digit(i, k), d[static_cast<std::size_t>(k)]);
        EXPECT_EQ(GroupVector::from_index(p, m, i).index(), i);
      }
    }
  }
}

TEST(IndexSpace, ArithmeticMatchesDigitwise) {
  IndexSpace space(5, 2);
  for (Index i = 0; i < space.size(); ++i) {
    for (Index j = 0; j < space.size(); j += 3) {
      EXPECT_EQ(space.add(i, j), oracle::lin(5, 2, 1, i, 1, j));
      EXPECT_EQ(space.sub(i, j), oracle::lin(5, 2, 1, i, -1, j));
      EXPECT_EQ(space.combine(2, i, 3, j), oracle::lin(5, 2, 2, i, 3, j));
      const auto a = oracle::digits(i, 5, 2), b = oracle::digits(j, 5, 2);
      EXPECT_EQ(space.dot(i, j), (a[0] * b[0] + a[1] * b[1]) % 5);
    }
  }
}

TEST(RowReduce, RankOfKnownMatrices) {
  PrimeField f(3);
  EXPECT_EQ(rank_of(f, {{1, 2, 0}, {2, 1, 0}}), 1);
  EXPECT_EQ(rank_of(f, {{1, 0, 0}, {0, 1, 0}, {1, 1, 1}}), 3);
  EXPECT_EQ(rank_of(f, {}), 0);
  EXPECT_TRUE(in_span(f, {{1, 1, 0}, {0, 0, 1}}, {2, 2, 1}));
  EXPECT_FALSE(in_span(f, {{1, 1, 0}, {0, 0, 1}}, {1, 2, 0}));
}

TEST(AffineSubspace, MembersMatchBruteForce) {
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int p = trial % 2 ? 3 : 5;
    const int m = 1 + trial % 3;
    const Index N = oracle::ipow(p, m);
    const int k = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(m) + 1));
    std::vector<GroupVector> normals;
    std::vector<Residue> offsets;
    for (int j = 0; j < k; ++j) {
      normals.push_back(GroupVector::from_index(p, m, uniform_below(rng, N)));
      offsets.push_back(static_cast<Residue>(uniform_below(rng, static_cast<std::uint64_t>(p))));
    }
    const auto c = AffineSubspace::from_normals(p, m, normals, offsets);
    std::set<Index> brute;
    for (Index x = 0; x < N; ++x) {
      const auto gx = GroupVector::from_index(p, m, x);
      bool ok = true;
      for (int j = 0; j < k; ++j) ok = ok && dot(normals[static_cast<std::size_t>(j)], gx) == offsets[static_cast<std::size_t>(j)];
      if (ok) brute.insert(x);
      EXPECT_EQ(c.contains_index(IndexSpace(p, m), x), ok);
    }
    if (brute.empty()) {
      EXPECT_TRUE(c.empty());
      continue;
    }
    ASSERT_FALSE(c.empty());
    EXPECT_EQ(c.size(), brute.size());
    std::set<Index> enumerated;
    for (Index t = 0; t < c.size(); ++t) {
      const Index pt = c.point_index(t);
      enumerated.insert(pt);
      EXPECT_EQ(c.parameter_of(pt), t);
    }
    EXPECT_EQ(enumerated, brute);
  }
}

TEST(AffineSubspace, LiftedCharacterAgreesOnDirections) {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = 3, m = 3;
    const auto normal = GroupVector::from_index(p, m, 1 + uniform_below(rng, 26));
    const auto w = GroupVector::from_index(p, m, uniform_below(rng, 27));
    const auto c = AffineSubspace::coset(p, m, {normal}, w);
    ASSERT_EQ(c.dim(), 2);
    const auto eta = GroupVector::from_index(p, 2, uniform_below(rng, 9));
    const auto xi = c.lift_character(eta);
    const Residue base = dot(xi, c.point(0));
    for (Index t = 0; t < c.size(); ++t) {
      const Residue lhs = static_cast<Residue>((dot(xi, c.point(t)) - base + p) % p);
      EXPECT_EQ(lhs, dot(eta, GroupVector::from_index(p, 2, t)));
    }
  }
}

TEST(AffineSubspace, CosetOfLinearPartContainsOffset) {
  const auto normal = GroupVector(3, {1, 2});
  const auto w = GroupVector(3, {2, 2});
  const auto c = AffineSubspace::coset(3, 2, {normal}, w);
  EXPECT_TRUE(c.contains(w));
  EXPECT_TRUE(c.linear_part().contains(GroupVector::zero(3, 2)));
  EXPECT_EQ(c.linear_part().size(), 3u);
  EXPECT_EQ(c.basis().size(), 1u);
}

TEST(ResourceLimits, GuardsEntries) {
  ResourceLimits lim;
  lim.max_table_entries = 10;
  EXPECT_THROW(lim.check_entries(11, "test"), ResourceError);
  EXPECT_NO_THROW(lim.check_entries(10, "test"));
}
