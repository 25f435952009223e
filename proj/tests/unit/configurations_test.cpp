#include <gtest/gtest.h>

#include "lshape/configurations.hpp"
#include "lshape/linear_systems.hpp"
#include "lshape/random.hpp"
#include "oracles.hpp"

using namespace lshape;

namespace {

std::uint64_t brute_corners(const IndicatorSet& s, int n) {
  const int p = s.p();
  const Index N = oracle::ipow(p, n);
  std::uint64_t c = 0;
  for (Index x = 0; x < N; ++x)
    for (Index y = 0; y < N; ++y)
      for (Index z = 0; z < N; ++z)
        c += s.contains(x + N * y) && s.contains(x + N * oracle::lin(p, n, 1, y, 1, z)) &&
             s.contains(oracle::lin(p, n, 1, x, 1, z) + N * y);
  return c;
}

}  // namespace

TEST(CountL, MatchesBruteForce) {
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    const int p = i % 2 ? 3 : 5;
    const int n = p == 3 ? 1 + i % 2 : 1;
    const auto s = random_set(rng, p, 2 * n, 0.3 + 0.05 * (i % 8));
    const auto r = count_L(s);
    ASSERT_TRUE(r.exact_count && r.nontrivial_count);
    EXPECT_EQ(*r.exact_count, oracle::count_L(s, n, true));
    EXPECT_EQ(*r.nontrivial_count, oracle::count_L(s, n, false));
    EXPECT_EQ(*r.exact_count - *r.nontrivial_count, s.cardinality());
    const double N = static_cast<double>(oracle::ipow(p, n));
    EXPECT_NEAR(r.average, static_cast<double>(*r.exact_count) / (N * N * N), 1e-15);
    EXPECT_EQ(is_L_free(s), *r.nontrivial_count == 0);
  }
}

TEST(CountCorners, MatchesBruteForce) {
  Rng rng(42);
  for (int i = 0; i < 10; ++i) {
    const auto s = random_set(rng, 3, 4, 0.4);
    const auto r = count_corners(s);
    EXPECT_EQ(*r.exact_count, brute_corners(s, 2));
  }
}

TEST(LambdaL, MatchesBruteForceOnComplexTables) {
  Rng rng(43);
  for (int n : {1, 2}) {
    std::vector<FunctionTable> g;
    for (int j = 0; j < 4; ++j) g.push_back(random_one_bounded(rng, 3, 2 * n));
    const auto r = lambda_L(g[0], g[1], g[2], g[3]);
    EXPECT_NEAR(std::abs(r.value - oracle::lambda_L(g[0], g[1], g[2], g[3], n)), 0.0, 1e-12);
    EXPECT_FALSE(r.exact_count.has_value());
  }
}

TEST(LambdaL, AgreesWithGenericSystemCount) {
  Rng rng(44);
  const auto s = random_set(rng, 3, 4, 0.5);
  const auto sys = LinearFormSystem::l_shapes(3);
  EXPECT_EQ(system_count(sys, {s, s, s, s}), *count_L(s).exact_count);
  const auto c = count_system(std::vector<IndicatorSet>{s, s, s, s}, sys);
  EXPECT_EQ(c.count, count_L(s).exact_count);
}

TEST(DotSet, CountMatchesBruteForce) {
  for (const auto& [p, n] : std::vector<std::pair<int, int>>{{3, 2}, {3, 3}, {5, 2}}) {
    const auto s = dot_set(p, n);
    const Index N = oracle::ipow(p, n);
    EXPECT_EQ(s.cardinality(), (N - 1) * (N / static_cast<Index>(p)) + N);
    EXPECT_EQ(*count_L(s).exact_count, oracle::count_L(s, n, true)) << p << " " << n;
  }
}

// The transcribed closed form agrees with brute force at (3, 3) only; the
// other sizes are kept here so a change in either side is noticed.
TEST(DotSet, ClosedFormAgainstBruteForce) {
  EXPECT_EQ(dot_closed_form_count(3, 3), oracle::count_L(dot_set(3, 3), 3, true));
  EXPECT_EQ(oracle::count_L(dot_set(3, 2), 2, true), 73u);
  EXPECT_EQ(dot_closed_form_count(3, 2), 81u);
  EXPECT_EQ(oracle::count_L(dot_set(5, 2), 2, true), 489u);
  EXPECT_EQ(dot_closed_form_count(5, 2), 425u);
  EXPECT_THROW(dot_closed_form_count(3, 1), std::invalid_argument);
}

TEST(DotSet, ObstructionExampleAtDeskScale) {
  const auto ex = obstruction_example(ObstructionKind::dot, 3, 3, 0);
  EXPECT_EQ(ex.set.cardinality(), 261u);
  EXPECT_EQ(ex.density_numerator, 261u);
  EXPECT_EQ(ex.density_denominator, 729u);
  EXPECT_EQ(ex.predicted_count, std::optional<std::uint64_t>(1215));
}

TEST(Obstructions, RandomKindsAreSeeded) {
  for (auto kind : {ObstructionKind::random_phi, ObstructionKind::coordinate}) {
    const auto a = obstruction_example(kind, 3, 2, 5);
    const auto b = obstruction_example(kind, 3, 2, 5);
    EXPECT_EQ(a.set, b.set);
    EXPECT_EQ(obstruction_kind_from_string(to_string(kind)), kind);
  }
  EXPECT_THROW(obstruction_kind_from_string("nope"), std::invalid_argument);
}

TEST(CoordinateSet, MembershipIsFirstCoordinate) {
  const std::vector<Residue> u = {0, 1, 2, 1, 1, 0, 2, 2, 0};
  const auto s = coordinate_set(3, 2, u);
  for (Index x = 0; x < 9; ++x)
    for (Index y = 0; y < 9; ++y) EXPECT_EQ(s.contains(x + 9 * y), static_cast<Residue>(y % 3) == u[x]);
}

TEST(Telescope, BoundHolds) {
  Rng rng(45);
  for (int i = 0; i < 20; ++i) {
    const auto s = random_set(rng, 3, 4, 0.2 + 0.03 * i);
    const auto r = telescope_check(s);
    EXPECT_TRUE(r.holds);
    EXPECT_LE(r.lhs, r.rhs + 1e-9);
  }
}

TEST(LambdaCorner, NormalizedByCube) {
  const auto one = FunctionTable::constant(3, 4, 1.0);
  EXPECT_NEAR(std::abs(lambda_corner(one, one, one).value - 1.0), 0.0, 1e-12);
}
