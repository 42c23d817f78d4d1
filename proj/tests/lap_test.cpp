#include <gtest/gtest.h>

#include "mapland/lap.hpp"
#include "oracles.hpp"

using namespace mapland;

TEST(Lap, ZeroMatrixGivesIdentity) {
  for (int n = 1; n <= 6; ++n) {
    const auto s = solve_lap(SquareMatrix(n));
    EXPECT_EQ(s.value, 0);
    EXPECT_EQ(s.perm, identity_permutation(n));
  }
}

TEST(Lap, TwoByTwo) {
  const auto s = solve_lap(SquareMatrix::from_rows({{1, 2}, {3, 0}}));
  EXPECT_EQ(s.value, 1);
  EXPECT_EQ(s.perm, (Permutation{0, 1}));
  const auto t = solve_lap(SquareMatrix::from_rows({{5, 2}, {3, 9}}));
  EXPECT_EQ(t.value, 5);
  EXPECT_EQ(t.perm, (Permutation{1, 0}));
}

TEST(Lap, NonSquareRejected) {
  EXPECT_THROW(SquareMatrix::from_rows({{1, 2}, {3}}), ShapeError);
  EXPECT_THROW(SquareMatrix(2, std::vector<Cost>(3)), ShapeError);
}

TEST(Lap, MatchesBruteForce) {
  Rng rng(2024);
  LapSolver solver;
  for (int t = 0; t < 600; ++t) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const auto m = oracle::random_matrix(n, rng, -1000, 1000);
    const auto got = solver.solve(m);
    const auto want = oracle::brute_lap(m);
    ASSERT_EQ(got.value, want.value) << "n=" << n;
    ASSERT_TRUE(is_permutation(got.perm));
    ASSERT_EQ(assignment_cost(m, got.perm), got.value);
  }
}

// Small value ranges produce many optimal permutations; the solver must
// return the lexicographically smallest one.
TEST(Lap, TiesResolveLexicographically) {
  Rng rng(77);
  LapSolver solver;
  for (int t = 0; t < 600; ++t) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const auto m = oracle::random_matrix(n, rng, 0, 2);
    const auto got = solver.solve(m);
    const auto want = oracle::brute_lap(m);
    ASSERT_EQ(got.value, want.value);
    ASSERT_EQ(got.perm, want.perm);
  }
}

TEST(Lap, ShiftInvariance) {
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + static_cast<int>(rng.below(7));
    auto m = oracle::random_matrix(n, rng, 0, 100000);
    const auto base = solve_lap(m);
    const Cost shift = rng.uniform(-5000, 5000);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) += shift;
    const auto moved = solve_lap(m);
    EXPECT_EQ(moved.value, base.value + shift * n);
    EXPECT_EQ(moved.perm, base.perm);
  }
}

TEST(Lap, LargeMatrixIsConsistent) {
  Rng rng(3);
  const auto m = oracle::random_matrix(60, rng, 0, 1000000);
  const auto s = solve_lap(m);
  EXPECT_TRUE(is_permutation(s.perm));
  EXPECT_EQ(assignment_cost(m, s.perm), s.value);
  // No single 2-swap improves an optimum.
  for (int a = 0; a < 60; ++a)
    for (int b = a + 1; b < 60; ++b)
      EXPECT_LE(s.value, s.value - m(a, s.perm[a]) - m(b, s.perm[b]) + m(a, s.perm[b]) + m(b, s.perm[a]));
}
