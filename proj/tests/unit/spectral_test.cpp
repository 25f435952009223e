#include <gtest/gtest.h>

#include "lshape/gowers.hpp"
#include "lshape/random.hpp"
#include "lshape/spectral.hpp"
#include "oracles.hpp"

using namespace lshape;

TEST(Dft, MatchesDirectSum) {
  Rng rng(21);
  for (const auto& [p, m] : std::vector<std::pair<int, int>>{{3, 1}, {3, 2}, {3, 3}, {5, 1}, {5, 2}, {7, 1}}) {
    const auto f = random_one_bounded(rng, p, m);
    const auto fast = dft(f);
    const auto slow = oracle::dft(f);
    for (Index i = 0; i < f.size(); ++i) EXPECT_NEAR(std::abs(fast[i] - slow[static_cast<std::size_t>(i)]), 0.0, 1e-12);
  }
}

TEST(Dft, InverseRoundTrip) {
  Rng rng(22);
  const auto f = random_one_bounded(rng, 3, 4);
  const auto back = inverse_dft(dft(f));
  for (Index i = 0; i < f.size(); ++i) EXPECT_NEAR(std::abs(back[i] - f[i]), 0.0, 1e-12);
}

TEST(Dft, CharacterHasOneCoefficient) {
  const auto xi = GroupVector(5, {2, 0, 4});
  const auto fh = dft(FunctionTable::character(xi));
  for (Index i = 0; i < fh.size(); ++i) {
    EXPECT_NEAR(std::abs(fh[i] - (i == xi.index() ? Complex(1.0) : Complex(0.0))), 0.0, 1e-12);
  }
}

TEST(Convolve, TransformIsProduct) {
  Rng rng(23);
  const auto f = random_one_bounded(rng, 3, 2);
  const auto g = random_one_bounded(rng, 3, 2);
  const auto c = convolve(f, g);
  const Index N = f.size();
  for (Index x = 0; x < N; ++x) {
    Complex direct = 0.0;
    for (Index y = 0; y < N; ++y) direct += f[y] * g[oracle::lin(3, 2, 1, x, -1, y)];
    EXPECT_NEAR(std::abs(c[x] - direct / static_cast<double>(N)), 0.0, 1e-12);
  }
}

TEST(InverseU2, PicksLargestCoefficientAndHoldsContract) {
  Rng rng(24);
  for (int i = 0; i < 50; ++i) {
    const auto f = random_one_bounded(rng, 3, 2);
    const auto r = inverse_u2(f, 0.1);
    const auto fh = oracle::dft(f);
    double best = 0.0;
    for (const auto& c : fh) best = std::max(best, std::abs(c));
    EXPECT_NEAR(r.corr, best, 1e-12);
    EXPECT_NEAR(std::abs(fh[static_cast<std::size_t>(r.xi.index())]), best, 1e-12);
    EXPECT_GE(r.corr, r.u2 * r.u2);
    EXPECT_TRUE(r.contract_holds);
  }
}

TEST(InverseU2, TiesGoToSmallestIndex) {
  const auto r = inverse_u2(FunctionTable::constant(3, 2, 0.0));
  EXPECT_EQ(r.xi.index(), 0u);
  EXPECT_EQ(r.corr, 0.0);
}

TEST(U2, FourthMomentEqualsCubeAverage) {
  Rng rng(25);
  const auto f = random_one_bounded(rng, 5, 1);
  EXPECT_NEAR(u2_fourth_power(f), oracle::gowers_power(f, 2).real(), 1e-12);
}

TEST(SubspaceAverage, BoundHoldsOnCosets) {
  Rng rng(26);
  for (int i = 0; i < 40; ++i) {
    const auto f = random_one_bounded(rng, 3, 3);
    const auto normal = GroupVector::from_index(3, 3, 1 + uniform_below(rng, 26));
    const auto w = GroupVector::from_index(3, 3, uniform_below(rng, 27));
    const auto c = AffineSubspace::coset(3, 3, {normal}, w);
    const auto r = subspace_average_bound_check(f, c);
    Complex avg = 0.0;
    for (Index t = 0; t < c.size(); ++t) avg += f[c.point_index(t)];
    EXPECT_NEAR(r.average_modulus, std::abs(avg) / static_cast<double>(c.size()), 1e-12);
    EXPECT_EQ(r.codim, 1);
    EXPECT_TRUE(r.holds);
  }
}
