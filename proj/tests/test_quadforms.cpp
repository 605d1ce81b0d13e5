#include "quadcircle/quadforms.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qc;

namespace {

QuadricPair toy2() { return load_pair(QC_DATA_DIR "/toy2.pair"); }
QuadricPair main5() { return load_pair(QC_DATA_DIR "/main5.pair"); }

QuadraticForm random_form(std::mt19937_64& rng, int n, int bound) {
  std::uniform_int_distribution<int> u(-bound, bound);
  IntegerMatrix M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) M(i, j) = M(j, i) = u(rng);
  return QuadraticForm(M);
}

i64 cone_points_brute(const QuadricPair& pair, i64 p) {
  const int n = pair.n();
  std::vector<i64> x(static_cast<std::size_t>(n), 0);
  i64 c = 0;
  for (;;) {
    c += pair.Q1().eval_mod(x, p) == 0 && pair.Q2().eval_mod(x, p) == 0;
    int i = n - 1;
    while (i >= 0 && ++x[static_cast<std::size_t>(i)] == p) x[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) return c;
  }
}

}  // namespace

TEST(QuadraticForm, Eval) {
  EXPECT_EQ(QuadraticForm::sum_of_squares(3).eval({1, 1, 1}), 3);
  EXPECT_EQ(QuadraticForm(IntegerMatrix{{0, 1}, {1, 0}}).eval({2, 3}), 12);
  EXPECT_EQ(QuadraticForm::diagonal({1, 2, 3, -4, -5}).eval({1, 1, 1, 1, 1}), -3);
  EXPECT_THROW(QuadraticForm::sum_of_squares(3).eval({1, 1}), InvalidArgument);
  EXPECT_THROW(QuadraticForm(IntegerMatrix{{0, 1}, {2, 0}}), InvalidArgument);
}

TEST(DualForm, Examples) {
  EXPECT_EQ(dual_form(QuadraticForm::sum_of_squares(3)).matrix(), IntegerMatrix::identity(3));
  EXPECT_EQ(dual_form(QuadraticForm::diagonal({1, 2})).matrix(), IntegerMatrix::diagonal({2, 1}));
  EXPECT_EQ(dual_form(QuadraticForm::diagonal({1, 2, 3})).matrix(), IntegerMatrix::diagonal({6, 3, 2}));
  EXPECT_THROW(dual_form(QuadraticForm::diagonal({1, 0})), DomainError);
}

TEST(DualForm, DoubleAdjugateScalesByDeterminantPower) {
  std::mt19937_64 rng(8);
  for (int n = 2; n <= 5; ++n)
    for (int it = 0; it < 20; ++it) {
      const auto Q = random_form(rng, n, 3);
      const i64 det = determinant(Q.matrix());
      if (det == 0) continue;
      const auto twice = dual_form(dual_form(Q));
      EXPECT_EQ(twice.matrix(), Q.matrix().scaled(ipow(det, n - 2)));
      // adj(M) M = det I
      EXPECT_EQ(adjugate(Q.matrix()) * Q.matrix(), IntegerMatrix::identity(n).scaled(det));
    }
}

TEST(PencilPoly, DiagonalProduct) {
  const auto P = main5().pencil_poly();
  // prod (b1 + a_i b2) with a = (1, 2, 3, -4, -5): coefficients from b2^5 up to b1^5
  const std::vector<bigint> expected{120, 166, 27, -23, -3, 1};
  EXPECT_EQ(P.c, expected);
}

TEST(PencilPoly, ToyPair) {
  const auto P = toy2().pencil_poly();
  EXPECT_EQ(P.c, (std::vector<bigint>{-1, 0, 1}));
  EXPECT_EQ(P.to_string(), "b1^2 - b2^2");
}

TEST(PencilPoly, SpecialisationsMatchDeterminants) {
  std::mt19937_64 rng(31);
  for (int n = 2; n <= 5; ++n) {
    const auto Q1 = random_form(rng, n, 4);
    QuadraticForm Q2 = random_form(rng, n, 4);
    while (determinant(Q2.matrix()) == 0) Q2 = random_form(rng, n, 4);
    const QuadricPair pair(Q1, Q2);
    for (int it = 0; it < 10; ++it) {
      const i64 b1 = static_cast<i64>(rng() % 21) - 10, b2 = static_cast<i64>(rng() % 21) - 10;
      EXPECT_EQ(pair.pencil_poly().eval(b1, b2), bigint(determinant(pair.pencil(b1, b2))));
    }
    EXPECT_EQ(pair.pencil_poly().eval(1, 0), bigint(determinant(Q1.matrix())));
  }
}

TEST(BinaryDisc, Examples) {
  EXPECT_EQ(binary_disc(BinaryForm{{0, 1, 0}}), 1);   // b1 b2
  EXPECT_EQ(binary_disc(BinaryForm{{0, 0, 1}}), 0);   // b1^2
  EXPECT_EQ(binary_disc(BinaryForm{{-1, 0, 1}}), 4);  // b1^2 - b2^2
  EXPECT_EQ(binary_disc(BinaryForm{{0, 0, 1, 0}}), 0);  // b1^2 b2
  EXPECT_THROW(binary_disc(BinaryForm{{1, 1}}), InvalidArgument);
}

TEST(BinaryDisc, ProductOfRootDifferences) {
  // P = prod (b1 + a_i b2) has discriminant prod_{i<j} (a_i - a_j)^2
  const std::vector<i64> a{1, 2, 3, -4, -5};
  bigint expect = 1;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) expect *= (a[i] - a[j]) * (a[i] - a[j]);
  EXPECT_EQ(main5().disc_P(), expect);
  EXPECT_NE(toy2().disc_P(), 0);
  EXPECT_NE(load_pair(QC_DATA_DIR "/tern3.pair").disc_P(), 0);
  EXPECT_NE(load_pair(QC_DATA_DIR "/quat4.pair").disc_P(), 0);
}

TEST(BadPrimes, MainPair) {
  const auto pair = main5();
  const auto bad = bad_primes(pair, 50);
  EXPECT_EQ(bad, (std::vector<i64>{2, 3, 5, 7}));
  EXPECT_EQ(pair.det2(), 120);
}

TEST(BadPrimes, AlwaysContainsTwo) {
  for (const char* f : {"/toy2.pair", "/tern3.pair", "/quat4.pair"}) {
    const auto bad = bad_primes(load_pair(std::string(QC_DATA_DIR) + f), 30);
    ASSERT_FALSE(bad.empty());
    EXPECT_EQ(bad.front(), 2);
  }
}

TEST(BadPrimes, GoodPrimesPassEveryCheck) {
  for (const char* f : {"/tern3.pair", "/quat4.pair", "/main5.pair"}) {
    const auto pair = load_pair(std::string(QC_DATA_DIR) + f);
    const auto bad = bad_primes(pair, 23);
    for (i64 p : primes_up_to(23)) {
      if (std::binary_search(bad.begin(), bad.end(), p)) continue;
      EXPECT_TRUE(pencil_rank_ok_mod_p(pair, p)) << f << " p=" << p;
      if (std::pow(p, pair.n()) <= 3e6) {
        EXPECT_TRUE(smooth_mod_p_full(pair, p)) << f << " p=" << p;
      }
    }
  }
}

TEST(BadPrimes, KernelTestAgreesWithFullEnumeration) {
  std::mt19937_64 rng(77);
  int singular_seen = 0;
  for (int it = 0; it < 40; ++it) {
    const int n = 3;
    const auto Q1 = random_form(rng, n, 3);
    auto Q2 = random_form(rng, n, 3);
    while (determinant(Q2.matrix()) == 0) Q2 = random_form(rng, n, 3);
    const QuadricPair pair(Q1, Q2);
    for (i64 p : {3, 5, 7, 11}) {
      if (!pencil_rank_ok_mod_p(pair, p)) continue;
      const bool full = smooth_mod_p_full(pair, p);
      singular_seen += !full;
      ASSERT_EQ(smooth_mod_p_kernel(pair, p), full) << it << " p=" << p;
    }
  }
  EXPECT_GT(singular_seen, 0);
}

TEST(ConePoints, ToyPairAtThree) {
  const QuadricPair pair(QuadraticForm::sum_of_squares(2), QuadraticForm(IntegerMatrix{{0, 1}, {1, 0}}));
  EXPECT_EQ(count_cone_points_mod_p(pair, 3), 1);
}

TEST(ConePoints, MatchBruteForceAndContainOrigin) {
  for (const char* f : {"/toy2.pair", "/tern3.pair", "/quat4.pair"}) {
    const auto pair = load_pair(std::string(QC_DATA_DIR) + f);
    for (i64 p : {2, 3, 5, 7, 11}) {
      const i64 c = count_cone_points_mod_p(pair, p);
      EXPECT_GE(c, 1);
      EXPECT_EQ(c, cone_points_brute(pair, p)) << f << " p=" << p;
    }
  }
}

TEST(ConePoints, WeilSizeForMainPair) {
  // #V(F_p) = p^{n-2} + O(p^{(n-1)/2}), with a constant of moderate size
  const auto pair = main5();
  double C = 0.0;
  for (i64 p : {11, 13, 17}) {
    const double dev = std::abs(static_cast<double>(count_cone_points_mod_p(pair, p)) - std::pow(p, 3));
    C = std::max(C, dev / std::pow(p, 2));
  }
  EXPECT_LT(C, 3.0);
}

TEST(ConePoints, GuardRaised) {
  ExecPolicy policy;
  policy.guard = 1e12;
  EXPECT_THROW(count_cone_points_mod_p(main5(), 47, policy), ResourceLimit);
}

TEST(VmSingular, RejectsMultipleOfP) {
  EXPECT_THROW(is_Vm_singular_mod_p(main5(), {11, 22, 0, 0, 0}, 11), InvalidArgument);
}

TEST(VmSingular, TangentHyperplaneIsDetected) {
  const auto pair = main5();
  const i64 p = 11;
  // find a non-zero point of V(F_p)
  std::vector<i64> x0;
  for (i64 a = 0; a < p && x0.empty(); ++a)
    for (i64 b = 0; b < p && x0.empty(); ++b)
      for (i64 c = 0; c < p && x0.empty(); ++c)
        for (i64 d = 0; d < p && x0.empty(); ++d)
          for (i64 e = 1; e < p; ++e) {
            const std::vector<i64> x{a, b, c, d, e};
            if (pair.Q1().eval_mod(x, p) == 0 && pair.Q2().eval_mod(x, p) == 0) {
              x0 = x;
              break;
            }
          }
  ASSERT_FALSE(x0.empty());
  const auto g1 = pair.Q1().matrix().apply(x0), g2 = pair.Q2().matrix().apply(x0);
  std::vector<i64> m(5);
  for (int i = 0; i < 5; ++i) m[static_cast<std::size_t>(i)] = mod(2 * g1[static_cast<std::size_t>(i)] + 3 * 2 * g2[static_cast<std::size_t>(i)], p);
  EXPECT_TRUE(is_Vm_singular_mod_p(pair, m, p));
}

TEST(VmSingular, GenericHyperplanesAreMostlySmooth) {
  const auto pair = load_pair(QC_DATA_DIR "/quat4.pair");
  const i64 p = 13;
  std::mt19937_64 rng(4);
  int singular = 0, total = 0;
  for (int it = 0; it < 60; ++it) {
    std::vector<i64> m(4);
    for (auto& v : m) v = static_cast<i64>(rng() % p);
    if (std::all_of(m.begin(), m.end(), [](i64 v) { return v == 0; })) continue;
    singular += is_Vm_singular_mod_p(pair, m, p);
    ++total;
  }
  EXPECT_LT(singular, total / 3);
}

TEST(PairFile, ParsesPolynomialsAndMatrices) {
  const auto pair = parse_pair("n = 3\nQ1.poly = x1^2 + x2^2 + x3^2\nQ2.poly = x1^2 + 4*x1*x2 - 3*x3^2\n");
  EXPECT_EQ(pair.Q2().matrix(), (IntegerMatrix{{1, 2, 0}, {2, 0, 0}, {0, 0, -3}}));
  const auto again = parse_pair(format_pair(pair));
  EXPECT_EQ(again.Q1(), pair.Q1());
  EXPECT_EQ(again.Q2(), pair.Q2());
  EXPECT_EQ(main5().Q2().matrix(), IntegerMatrix::diagonal({1, 2, 3, -4, -5}));
}

TEST(PairFile, Errors) {
  EXPECT_THROW(parse_pair("n = 2\nQ1.poly = x1^2 + x2^2\nQ2.poly = 3*x1*x2\n"), ParseError);
  EXPECT_THROW(parse_pair("n = 2\nQ1.matrix = 1 0 0\nQ2.matrix = 0 1 1 0\n"), ParseError);
  EXPECT_THROW(parse_pair("n = 2\nQ1.matrix = 1 2 0 1\nQ2.matrix = 0 1 1 0\n"), ParseError);
  EXPECT_THROW(parse_pair("n = 2\nQ1.matrix = 1 0 0 1\nQ2.matrix = 1 0 0 0\n"), ParseError);
  EXPECT_THROW(parse_pair("n = 2\nQ1.matrix = 1 0 0 1\n"), ParseError);
  EXPECT_THROW(parse_pair("n = 2\nQ1.matrix = 1 0 0 x\nQ2.matrix = 0 1 1 0\n"), ParseError);
  EXPECT_THROW(parse_pair("n = 2\nQ1.poly = x1^2 + x3^2\nQ2.matrix = 0 1 1 0\n"), ParseError);
  EXPECT_THROW(parse_pair("n = 2\nQ1.poly = x1 + x2^2\nQ2.matrix = 0 1 1 0\n"), ParseError);
  EXPECT_THROW(parse_pair("n = 2\nfoo = 1\nQ1.matrix = 1 0 0 1\nQ2.matrix = 0 1 1 0\n"), ParseError);
  EXPECT_THROW(load_pair("/nonexistent/file.pair"), ParseError);
}
