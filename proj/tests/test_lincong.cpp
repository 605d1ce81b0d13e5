#include "quadcircle/lincong.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qc;

namespace {

i64 brute_count(const IntegerMatrix& M, const std::vector<i64>& a, i64 q) {
  const int n = M.cols();
  std::vector<i64> x(static_cast<std::size_t>(n), 0);
  i64 count = 0;
  for (;;) {
    const auto y = M.apply(x);
    bool ok = true;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (mod(y[i] - a[i], q) != 0) {
        ok = false;
        break;
      }
    count += ok;
    int i = n - 1;
    while (i >= 0 && ++x[static_cast<std::size_t>(i)] == q) x[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
  }
  return count;
}

IntegerMatrix random_matrix(std::mt19937_64& rng, int r, int c, int lo, int hi) {
  std::uniform_int_distribution<int> u(lo, hi);
  IntegerMatrix M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = u(rng);
  return M;
}

void expect_valid_smith(const IntegerMatrix& M) {
  const auto s = smith(M);
  const IntegerMatrix D = s.A * M * s.B;
  ASSERT_TRUE(D.is_diagonal());
  for (std::size_t i = 0; i < s.d.size(); ++i) {
    ASSERT_EQ(D(static_cast<int>(i), static_cast<int>(i)), s.d[i]);
    ASSERT_GE(s.d[i], 0);
    if (i + 1 < s.d.size()) {
      if (s.d[i] == 0) {
        ASSERT_EQ(s.d[i + 1], 0);
      } else {
        ASSERT_EQ(s.d[i + 1] % s.d[i], 0);
      }
    }
  }
  ASSERT_EQ(std::abs(determinant(s.A)), 1);
  ASSERT_EQ(std::abs(determinant(s.B)), 1);
  ASSERT_EQ(s.rank(), rank(M));
}

}  // namespace

TEST(Smith, Examples) {
  EXPECT_EQ(smith(IntegerMatrix::identity(3)).d, (std::vector<i64>{1, 1, 1}));
  EXPECT_EQ(smith(IntegerMatrix::diagonal({2, 4})).d, (std::vector<i64>{2, 4}));
  EXPECT_EQ(smith(IntegerMatrix{{2, 1}, {1, 2}}).d, (std::vector<i64>{1, 3}));
  EXPECT_EQ(smith(IntegerMatrix::diagonal({6, 4})).d, (std::vector<i64>{2, 12}));
  EXPECT_EQ(smith(IntegerMatrix(2, 3)).d, (std::vector<i64>{0, 0}));
}

TEST(Smith, RandomMatricesDecomposeCorrectly) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 300; ++it) {
    const int r = 1 + static_cast<int>(rng() % 4), c = 1 + static_cast<int>(rng() % 4);
    expect_valid_smith(random_matrix(rng, r, c, -6, 6));
  }
}

TEST(IntegerMatrix, OverflowIsReported) {
  const i64 big = INT64_MAX / 2;
  const IntegerMatrix M{{big, big}, {big, big}};
  EXPECT_THROW(M * M, ArithmeticOverflow);
  EXPECT_THROW(M.scaled(3), ArithmeticOverflow);
  EXPECT_THROW(M + M + M, ArithmeticOverflow);
}

TEST(Determinant, AndRank) {
  EXPECT_EQ(determinant(IntegerMatrix{{2, 1}, {1, 2}}), 3);
  EXPECT_EQ(determinant(IntegerMatrix::diagonal({1, 2, 3, -4, -5})), 120);
  EXPECT_EQ(determinant(IntegerMatrix{{0, 1}, {1, 0}}), -1);
  EXPECT_EQ(rank(IntegerMatrix{{1, 1}, {1, 1}}), 1);
  EXPECT_EQ(rank(IntegerMatrix(3, 3)), 0);
  EXPECT_EQ(rank_mod_p(IntegerMatrix{{1, 2}, {3, 1}}, 5), 1);
  EXPECT_EQ(rank_mod_p(IntegerMatrix{{1, 2}, {3, 1}}, 7), 2);
}

TEST(KernelModP, VectorsAreInKernel) {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 100; ++it) {
    const i64 p = std::vector<i64>{2, 3, 5, 7}[rng() % 4];
    const auto M = random_matrix(rng, 3, 4, -3, 3);
    const auto ker = kernel_mod_p(M, p);
    ASSERT_EQ(static_cast<int>(ker.size()), 4 - rank_mod_p(M, p));
    for (const auto& v : ker)
      for (i64 y : M.apply(v)) ASSERT_EQ(mod(y, p), 0);
  }
}

TEST(CountLincong, Examples) {
  EXPECT_EQ(count_lincong(IntegerMatrix::identity(3), {0, 0, 0}, 12), 1);
  EXPECT_EQ(count_lincong(IntegerMatrix(2, 2), {0, 0}, 7), 49);
  EXPECT_EQ(count_lincong(IntegerMatrix::diagonal({2, 2}), {0, 0}, 4), 4);
  EXPECT_EQ(count_lincong(IntegerMatrix::diagonal({2, 2}), {1, 0}, 4), 0);
  EXPECT_EQ(count_lincong(IntegerMatrix::identity(2), {0, 0}, 1), 1);
}

TEST(CountLincong, MatchesBruteForce) {
  std::mt19937_64 rng(2024);
  for (int it = 0; it < 200; ++it) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const i64 q = 1 + static_cast<i64>(rng() % 64);
    const auto M = random_matrix(rng, n, n, -5, 5);
    std::vector<i64> a(static_cast<std::size_t>(n));
    // half of the right-hand sides are in the image, so counts are not mostly 0
    if (it % 2 == 0) {
      std::vector<i64> x(static_cast<std::size_t>(n));
      for (auto& v : x) v = static_cast<i64>(rng() % 64);
      a = M.apply(x);
    } else {
      for (auto& v : a) v = static_cast<i64>(rng() % 64);
    }
    ASSERT_EQ(count_lincong(M, a, q), brute_count(M, a, q)) << "instance " << it;
  }
}

TEST(CountLincong, MultiplicativeInCoprimeModuli) {
  std::mt19937_64 rng(17);
  const std::vector<std::pair<i64, i64>> pairs{{4, 9}, {8, 5}, {3, 16}, {25, 2}, {7, 9}};
  for (int it = 0; it < 60; ++it) {
    const auto M = random_matrix(rng, 3, 3, -5, 5);
    const auto [q1, q2] = pairs[static_cast<std::size_t>(it) % pairs.size()];
    std::vector<i64> a{0, static_cast<i64>(rng() % 10), 0};
    ASSERT_EQ(count_lincong(M, a, q1 * q2), count_lincong(M, a, q1) * count_lincong(M, a, q2));
  }
}

TEST(SmithBound, Examples) {
  EXPECT_EQ(smith_bound(IntegerMatrix::identity(2), PrimePower::make(5, 3)), 1);
  EXPECT_EQ(smith_bound(IntegerMatrix::diagonal({3, 1}), PrimePower::make(3, 1)), 3);
  EXPECT_EQ(smith_bound(IntegerMatrix{{1, 1}, {1, 1}}, PrimePower::make(5, 1)), 5);
  EXPECT_EQ(smith_bound(IntegerMatrix(2, 2), PrimePower::make(5, 2)), 625);
}

TEST(SmithBound, DominatesEveryCount) {
  std::mt19937_64 rng(99);
  for (int it = 0; it < 200; ++it) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const i64 p = std::vector<i64>{2, 3, 5, 7}[rng() % 4];
    const int r = 1 + static_cast<int>(rng() % 2);
    const auto q = PrimePower::make(p, r);
    const auto M = random_matrix(rng, n, n, -5, 5);
    const i64 bound = smith_bound(M, q);
    std::vector<i64> a(static_cast<std::size_t>(n), 0);
    ASSERT_LE(count_lincong(M, a, q.value), bound);
    for (auto& v : a) v = static_cast<i64>(rng() % q.value);
    ASSERT_LE(count_lincong(M, a, q.value), bound);
  }
}

TEST(CountLincong, PrimitiveSolutionForcesOrderBelowDeterminant) {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 150; ++it) {
    const auto M = random_matrix(rng, 2, 2, -6, 6);
    const i64 det = determinant(M);
    if (det == 0) continue;
    for (i64 p : {2, 3, 5}) {
      for (int r = 1; r <= 3; ++r) {
        const i64 q = ipow(p, r);
        bool primitive = false;
        for (i64 x0 = 0; x0 < q && !primitive; ++x0)
          for (i64 x1 = 0; x1 < q; ++x1) {
            if (x0 % p == 0 && x1 % p == 0) continue;
            const auto y = M.apply({x0, x1});
            if (mod(y[0], q) == 0 && mod(y[1], q) == 0) {
              primitive = true;
              break;
            }
          }
        if (primitive) {
          ASSERT_LE(r, vp(det, p));
        }
      }
    }
  }
}
