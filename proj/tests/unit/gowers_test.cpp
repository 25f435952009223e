#include <gtest/gtest.h>

#include <cmath>

#include "lshape/gowers.hpp"
#include "lshape/random.hpp"
#include "oracles.hpp"

using namespace lshape;

namespace {

double oracle_norm(const FunctionTable& f, int s) {
  return std::pow(std::max(0.0, oracle::gowers_power(f, s).real()), 1.0 / (1 << s));
}

}  // namespace

TEST(GowersU, RecursionMatchesCubeOracle) {
  Rng rng(31);
  for (const auto& [p, m, smax] : std::vector<std::tuple<int, int, int>>{{3, 1, 4}, {5, 1, 3}, {3, 2, 2}}) {
    for (int s = 1; s <= smax; ++s) {
      const auto f = random_one_bounded(rng, p, m);
      EXPECT_NEAR(gowers_u(f, s).value, oracle_norm(f, s), 1e-10) << p << " " << m << " " << s;
      EXPECT_NEAR(gowers_u(f, s, {}, true).value, oracle_norm(f, s), 1e-10);
    }
  }
}

TEST(GowersU, KnownValues) {
  const auto one = FunctionTable::constant(3, 2, 1.0);
  for (int s = 1; s <= 3; ++s) EXPECT_NEAR(gowers_u(one, s).value, 1.0, 1e-12);
  const auto chi = FunctionTable::character(GroupVector(3, {1, 2}));
  EXPECT_NEAR(gowers_u(chi, 1).value, 0.0, 1e-12);
  EXPECT_NEAR(gowers_u(chi, 2).value, 1.0, 1e-12);
  // A quadratic phase is invisible to U^2 but has full U^3 norm.
  const auto quad = FunctionTable::from_index_fn(5, 2, [](Index i) {
    const auto d = oracle::digits(i, 5, 2);
    const int q = (d[0] * d[0] + d[0] * d[1]) % 5;
    return std::polar(1.0, 2.0 * 3.14159265358979323846 * q / 5.0);
  });
  EXPECT_NEAR(gowers_u(quad, 3).value, 1.0, 1e-10);
  EXPECT_NEAR(gowers_u(quad, 2).value, std::pow(1.0 / 25.0, 0.25), 1e-10);
}

TEST(GowersU, MonotoneInS) {
  Rng rng(32);
  for (int i = 0; i < 20; ++i) {
    const auto f = random_one_bounded(rng, 3, 2);
    double prev = 0.0;
    for (int s = 1; s <= 4; ++s) {
      const double v = gowers_u(f, s).value;
      EXPECT_GE(v + 1e-12, prev);
      prev = v;
    }
  }
}

TEST(GowersU, CosetNormIsNormOfRestriction) {
  Rng rng(33);
  const auto f = random_one_bounded(rng, 3, 3);
  const auto c = AffineSubspace::coset(3, 3, {GroupVector(3, {1, 0, 2})}, GroupVector(3, {1, 1, 1}));
  for (int s = 1; s <= 3; ++s) EXPECT_NEAR(gowers_u(f, s, c).value, gowers_u(restrict(f, c), s).value, 1e-12);
}

TEST(GowersU, ResourceGuardRefusesHugeDefinition) {
  Rng rng(34);
  const auto f = random_one_bounded(rng, 3, 4);
  ResourceLimits lim;
  lim.max_operations = 1e6;
  EXPECT_THROW(gowers_u(f, 4, lim, true), ResourceError);
  EXPECT_GT(gowers_definition_cost(3, 4, 4), 10 * gowers_recursive_cost(3, 4, 4));
}

TEST(MakeNorm, NegativeRadicand) {
  EXPECT_THROW(make_norm(Complex(-1e-6, 0), 4), std::logic_error);
  EXPECT_EQ(make_norm(Complex(-1e-14, 0), 4).value, 0.0);
}

TEST(BoxNorm, MatchesRectangleAverage) {
  Rng rng(35);
  const auto g = random_one_bounded(rng, 3, 2);
  const Index N = 3;
  Complex acc = 0.0;
  for (Index x = 0; x < N; ++x)
    for (Index x2 = 0; x2 < N; ++x2)
      for (Index y = 0; y < N; ++y)
        for (Index y2 = 0; y2 < N; ++y2)
          acc += g[x + N * y] * std::conj(g[x + N * y2]) * std::conj(g[x2 + N * y]) * g[x2 + N * y2];
  acc /= 81.0;
  EXPECT_NEAR(box_norm(g).value, std::pow(acc.real(), 0.25), 1e-12);
}

TEST(StarNorms, AgreeWithDirectionalAverages) {
  Rng rng(36);
  for (int i = 0; i < 10; ++i) {
    const int p = i % 2 ? 3 : 5;
    const auto g = random_one_bounded(rng, p, 2);
    const DirectionSet d1 = {{0, 1}, {0, 1}, {1, 0}};
    const DirectionSet d2 = {{0, 1}, {static_cast<Residue>(p - 1), 1}};
    const DirectionSet d3 = {{static_cast<Residue>(p - 1), 2}};
    EXPECT_NEAR(std::pow(star_norm(g, 1).value, 8), directional_average(g, d1), 1e-10);
    EXPECT_NEAR(std::pow(star_norm(g, 2).value, 4), directional_average(g, d2), 1e-10);
    EXPECT_NEAR(std::pow(star_norm(g, 3).value, 2), directional_average(g, d3), 1e-10);
  }
  EXPECT_THROW(star_norm(FunctionTable::zeros(3, 2), 4), std::invalid_argument);
}

TEST(Delta, MultiplicativeDifference) {
  Rng rng(37);
  const auto f = random_one_bounded(rng, 5, 1);
  const auto d = delta(f, Index{2});
  for (Index x = 0; x < 5; ++x) EXPECT_NEAR(std::abs(d[x] - f[x] * std::conj(f[(x + 2) % 5])), 0.0, 1e-15);
}
