#include <gtest/gtest.h>

#include "lshape/linear_systems.hpp"
#include "lshape/random.hpp"
#include "oracles.hpp"

using namespace lshape;

TEST(CsComplexity, Progressions) {
  EXPECT_EQ(cs_complexity(LinearFormSystem::progression(5, 3)).s, 1);
  EXPECT_EQ(cs_complexity(LinearFormSystem::progression(5, 4)).s, 2);
  EXPECT_EQ(cs_complexity(LinearFormSystem::progression(7, 5)).s, 3);
  EXPECT_EQ(cs_complexity(LinearFormSystem::corner_shadow(5)).s, 1);
}

TEST(CsComplexity, CertificateVerifies) {
  for (int k = 3; k <= 5; ++k) {
    const auto sys = LinearFormSystem::progression(7, k);
    const auto cert = cs_complexity(sys);
    EXPECT_TRUE(verify_certificate(sys, cert));
  }
}

TEST(CsComplexity, ParallelFormsAreInfinite) {
  const LinearFormSystem sys(5, 2, {{1, 0}, {2, 0}, {0, 1}});
  const auto cert = cs_complexity(sys);
  EXPECT_TRUE(cert.infinite);
  ASSERT_TRUE(cert.parallel.has_value());
}

TEST(CsComplexity, DuplicatesCountOnce) {
  const LinearFormSystem sys(5, 2, {{1, 0}, {1, 1}, {1, 1}, {1, 2}});
  EXPECT_TRUE(sys.has_duplicates());
  std::vector<std::vector<int>> groups;
  EXPECT_EQ(sys.distinct(&groups).size(), 3);
  EXPECT_EQ(cs_complexity(sys).s, 1);
}

TEST(CsComplexity, BlockSystemsRejected) {
  EXPECT_THROW(cs_complexity(LinearFormSystem::corners(3)), std::invalid_argument);
  EXPECT_THROW(LinearFormSystem(3, 2, {{0, 0}}), std::invalid_argument);
}

TEST(SystemAverage, MatchesDirectSum) {
  Rng rng(51);
  const int p = 5;
  const auto sys = LinearFormSystem::progression(p, 3);
  std::vector<FunctionTable> fs;
  for (int j = 0; j < 3; ++j) fs.push_back(random_one_bounded(rng, p, 2));
  Complex acc = 0.0;
  for (Index x = 0; x < 25; ++x)
    for (Index y = 0; y < 25; ++y)
      acc += fs[0][x] * fs[1][oracle::lin(p, 2, 1, x, 1, y)] * fs[2][oracle::lin(p, 2, 1, x, 2, y)];
  EXPECT_NEAR(std::abs(system_average(sys, fs) - acc / 625.0), 0.0, 1e-12);
}

TEST(Gvn, HoldsAndRequiresComplexity) {
  Rng rng(52);
  const auto sys = LinearFormSystem::progression(5, 4);
  for (int i = 0; i < 10; ++i) {
    std::vector<FunctionTable> fs;
    for (int j = 0; j < 4; ++j) fs.push_back(random_one_bounded(rng, 5, 1));
    const auto r = gvn_check(sys, fs, 2);
    EXPECT_TRUE(r.holds);
    EXPECT_LE(r.lhs, r.rhs + 1e-9);
  }
  std::vector<FunctionTable> fs(4, FunctionTable::constant(5, 1, 1.0));
  EXPECT_THROW(gvn_check(sys, fs, 1), std::invalid_argument);
}

TEST(UsUniformity, HoldsAndRejectsDuplicates) {
  Rng rng(53);
  const auto sys = LinearFormSystem::progression(5, 3);
  for (int i = 0; i < 10; ++i) {
    std::vector<FunctionTable> fs;
    for (int j = 0; j < 3; ++j) fs.push_back(random_set(rng, 5, 2, 0.5).table());
    EXPECT_TRUE(usuniformity_check(sys, fs, 1).holds);
  }
  const LinearFormSystem dup(5, 2, {{1, 0}, {1, 1}, {1, 1}});
  std::vector<FunctionTable> fs(3, FunctionTable::constant(5, 1, 1.0));
  EXPECT_THROW(usuniformity_check(dup, fs, 1), std::invalid_argument);
}

TEST(LinearFormSystem, LShapeImages) {
  const auto sys = LinearFormSystem::l_shapes(3);
  EXPECT_EQ(sys.size(), 4);
  EXPECT_EQ(sys.blocks(), 2);
  const IndexSpace space(3, 1);
  const std::vector<Index> vars = {1, 2, 1};  // x = 1, y = 2, z = 1
  EXPECT_EQ(sys.image(0, vars, space), 1u + 3u * 2u);
  EXPECT_EQ(sys.image(1, vars, space), 1u + 3u * 0u);
  EXPECT_EQ(sys.image(2, vars, space), 1u + 3u * 1u);
  EXPECT_EQ(sys.image(3, vars, space), 2u + 3u * 2u);
}
