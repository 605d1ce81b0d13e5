#include "quadcircle/modarith.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <set>

using namespace qc;

namespace {

int legendre_by_squares(i64 a, i64 p) {
  a = mod(a, p);
  if (a == 0) return 0;
  for (i64 x = 1; x < p; ++x)
    if (x * x % p == a) return 1;
  return -1;
}

int jacobi_by_factoring(i64 a, i64 n) {
  int s = 1;
  for (const auto& pp : factorize(n))
    for (int t = 0; t < pp.r; ++t) s *= legendre_by_squares(a, pp.p);
  return s;
}

cplx gauss_chi_brute(i64 p, int r, i64 a) {
  const i64 q = ipow(p, r);
  cplx s = 0.0;
  for (i64 x = 0; x < q; ++x) s += static_cast<double>(legendre_by_squares(x, p)) * unit_root(mulmod(a, x, q), q);
  return s;
}

i64 ramanujan_brute(i64 q, i64 a) {
  cplx s = 0.0;
  for (i64 x = 0; x < q; ++x)
    if (std::gcd(x, q) == 1) s += unit_root(mulmod(a, x, q), q);
  return std::llround(s.real());
}

}  // namespace

TEST(Jacobi, SmallValues) {
  EXPECT_EQ(jacobi(1, 3), 1);
  EXPECT_EQ(jacobi(2, 3), -1);
  EXPECT_EQ(jacobi(4, 15), 1);
  EXPECT_EQ(jacobi(0, 1), 1);
  EXPECT_EQ(jacobi(5, 15), 0);
}

TEST(Jacobi, MatchesFactoredLegendreProduct) {
  for (i64 n = 1; n < 200; n += 2)
    for (i64 a = -50; a < 250; ++a) ASSERT_EQ(jacobi(a, n), jacobi_by_factoring(a, n)) << a << " " << n;
}

TEST(Jacobi, RejectsEvenOrNonPositive) {
  EXPECT_THROW(jacobi(3, 4), InvalidArgument);
  EXPECT_THROW(jacobi(3, 0), InvalidArgument);
  EXPECT_THROW(jacobi(3, -3), InvalidArgument);
}

TEST(Eps, Values) {
  EXPECT_TRUE(eps(5).agrees(SumValue::exact({1, 0})));
  EXPECT_TRUE(eps(3).agrees(SumValue::exact({0, 1})));
  EXPECT_TRUE(eps(13).agrees(SumValue::exact({1, 0})));
  EXPECT_THROW(eps(2), InvalidArgument);
  EXPECT_THROW(eps(9), InvalidArgument);
}

TEST(Ramanujan, Examples) {
  EXPECT_EQ(ramanujan(7, 0), 6);
  EXPECT_EQ(ramanujan(4, 2), -2);
  EXPECT_EQ(ramanujan(9, 1), 0);
  EXPECT_THROW(ramanujan(0, 1), InvalidArgument);
}

TEST(Ramanujan, MatchesUnitSum) {
  for (i64 q = 1; q <= 60; ++q)
    for (i64 a = -30; a <= 30; ++a) ASSERT_EQ(ramanujan(q, a), ramanujan_brute(q, a)) << q << " " << a;
}

TEST(Ramanujan, BoundedByGcd) {
  for (i64 q = 1; q <= 1000; q += 7)
    for (i64 a = -1000; a <= 1000; a += 13) {
      const i64 c = ramanujan(q, a);
      ASSERT_LE(std::abs(c), std::gcd(q, std::abs(a))) << q << " " << a;
    }
}

TEST(Ramanujan, InvariantUnderUnitsAtPrimePowers) {
  for (i64 p : {3, 5, 7})
    for (int r = 1; r <= 3; ++r) {
      const i64 q = ipow(p, r);
      for (i64 a = 0; a < q; ++a)
        for (i64 b : {1, 2, 4, 11})
          if (b % p) {
            ASSERT_EQ(ramanujan(q, a * b), ramanujan(q, a));
          }
    }
}

TEST(GaussChi, Examples) {
  const auto five = PrimePower::make(5, 1);
  EXPECT_NEAR(gauss_chi(five, 1).re, std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(gauss_chi(five, 1).im, 0.0, 1e-12);
  EXPECT_TRUE(gauss_chi(five, 0).vanishes());
  const auto nine = PrimePower::make(3, 2);
  EXPECT_TRUE(gauss_chi(nine, 3).agrees(SumValue(gauss_chi_brute(3, 2, 3), 1e-9)));
  EXPECT_THROW(gauss_chi(PrimePower::make(2, 3), 1), InvalidArgument);
}

TEST(GaussChi, MatchesDirectSummation) {
  for (i64 p : {3, 5, 7, 11, 13, 17})
    for (int r = 1; ipow(p, r) <= 343; ++r) {
      const auto q = PrimePower::make(p, r);
      const double tol = 1e-9 * std::pow(static_cast<double>(p), r / 2.0);
      for (i64 a = 0; a < q.value; ++a) {
        const cplx brute = gauss_chi_brute(p, r, a);
        ASSERT_LE(std::abs(gauss_chi(q, a).value() - brute), tol) << p << "^" << r << " a=" << a;
      }
    }
}

TEST(QuadGauss1d, Examples) {
  const auto v = quad_gauss_1d(PrimePower::make(3, 1), 1, 0);
  EXPECT_NEAR(v.re, 0.0, 1e-12);
  EXPECT_NEAR(v.im, std::sqrt(3.0), 1e-12);
  const auto w = quad_gauss_1d(PrimePower::make(5, 2), 1, 0);
  EXPECT_NEAR(w.re, 5.0, 1e-12);
  EXPECT_NEAR(w.im, 0.0, 1e-12);
  const cplx expect = unit_root(-1, 3) * cplx{0.0, std::sqrt(3.0)};
  EXPECT_LE(std::abs(quad_gauss_1d(PrimePower::make(3, 1), 1, 1).value() - expect), 1e-12);
  EXPECT_THROW(quad_gauss_1d(PrimePower::make(3, 1), 3, 0), InvalidArgument);
  EXPECT_THROW(quad_gauss_1d(PrimePower::make(2, 1), 1, 0), InvalidArgument);
}

TEST(QuadGauss1d, MatchesDirectSummation) {
  for (i64 p : {3, 5, 7, 11})
    for (int r = 1; r <= 3; ++r) {
      const auto q = PrimePower::make(p, r);
      for (i64 alpha = 1; alpha < p; ++alpha)
        for (i64 m = 0; m < q.value; ++m) {
          cplx s = 0.0;
          for (i64 k = 0; k < q.value; ++k)
            s += unit_root(mulmod(alpha, k * k, q.value) + mulmod(m, k, q.value), q.value);
          ASSERT_LE(std::abs(quad_gauss_1d(q, alpha, m).value() - s), 1e-9 * std::sqrt(static_cast<double>(q.value)))
              << p << "^" << r << " alpha=" << alpha << " m=" << m;
        }
    }
}

TEST(R2, Examples) {
  EXPECT_EQ(r2(1), 4);
  EXPECT_EQ(r2(5), 8);
  EXPECT_EQ(r2(3), 0);
  EXPECT_EQ(r2(25), 12);
  EXPECT_THROW(r2(0), InvalidArgument);
}

TEST(R2, DivisorCharacterIdentityForOddM) {
  for (i64 M = 1; M <= 10000; M += 2) {
    i64 s = 0;
    for (i64 d : divisors(M)) s += chi4(d);
    ASSERT_EQ(r2(M), 4 * s) << M;
  }
}

TEST(Integers, Helpers) {
  EXPECT_EQ(invmod(3, 7), 5);
  EXPECT_THROW(invmod(2, 4), InvalidArgument);
  EXPECT_EQ(powmod(3, 200, 1000003), powmod(9, 100, 1000003));
  EXPECT_EQ(euler_phi(36), 12);
  EXPECT_EQ(mobius(30), -1);
  EXPECT_EQ(mobius(12), 0);
  EXPECT_EQ(vp(72, 2), 3);
  EXPECT_EQ(vp_capped(0, 3, 4), 4);
  EXPECT_THROW(ipow(10, 30), ArithmeticOverflow);
  EXPECT_EQ(ipow_sat(10, 30), INT64_MAX);
  EXPECT_THROW(PrimePower::make(9, 1), InvalidArgument);
  const auto f = factorize(360);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0].value, 8);
  EXPECT_EQ(f[1].value, 9);
  EXPECT_EQ(f[2].value, 5);
}

TEST(SumValue, ToleranceAlgebra) {
  const SumValue a(1.0, 0.0, 1e-10), b(1.0 + 5e-11, 0.0, 1e-10);
  EXPECT_TRUE(a.agrees(b));
  EXPECT_FALSE(a.agrees(SumValue(1.001, 0.0, 1e-10)));
  EXPECT_TRUE(SumValue(3.0 + 1e-13, 1e-13, 1e-12).is_integral());
  EXPECT_EQ(SumValue(3.0 + 1e-13, 0.0, 1e-12).rounded(), 3);
  const SumValue p = a * b;
  EXPECT_GT(p.tol, a.tol);
}
