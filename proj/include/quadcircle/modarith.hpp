#pragma once

// Exact modular arithmetic, characters, and the one-dimensional character,
// Gauss and Ramanujan sums that every closed form in the library is built on.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "quadcircle/error.hpp"

namespace qc {

using i64 = std::int64_t;
using i128 = __int128;
using cplx = std::complex<double>;

/// Value of an exponential sum together with the absolute tolerance it is
/// known to. Two values agree when they differ by at most the sum of their
/// tolerances.
struct SumValue {
  double re = 0.0;
  double im = 0.0;
  double tol = 1e-12;

  SumValue() = default;
  SumValue(double r, double i, double t) : re(r), im(i), tol(t) {}
  SumValue(cplx z, double t) : re(z.real()), im(z.imag()), tol(t) {}

  cplx value() const { return {re, im}; }
  double abs() const { return std::hypot(re, im); }

  bool agrees(const SumValue& o) const {
    return std::abs(value() - o.value()) <= tol + o.tol;
  }
  bool vanishes() const { return abs() <= tol; }
  bool is_integral() const {
    return std::abs(re - std::round(re)) <= tol && std::abs(im) <= tol;
  }
  i64 rounded() const { return static_cast<i64>(std::llround(re)); }

  /// Exact value with the default closed-form tolerance.
  static SumValue exact(cplx z) { return {z, 1e-12 * std::max(1.0, std::abs(z))}; }
};

/// Product with first-order tolerance propagation.
inline SumValue operator*(const SumValue& a, const SumValue& b) {
  const double tol = a.abs() * b.tol + b.abs() * a.tol + a.tol * b.tol;
  return {a.value() * b.value(), tol};
}

namespace detail {
/// Tolerance for a direct sum of `terms` summands of modulus at most `max_mod`.
inline double direct_tol(double terms, double max_mod) {
  return 1e-8 * std::sqrt(std::max(terms, 1.0)) * std::max(max_mod, 1.0);
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Integer helpers

/// Least non-negative residue.
constexpr i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

constexpr i64 mulmod(i64 a, i64 b, i64 m) {
  return static_cast<i64>(static_cast<i128>(mod(a, m)) * mod(b, m) % m);
}

inline i64 powmod(i64 a, i64 e, i64 m) {
  i64 result = 1 % m, base = mod(a, m);
  while (e > 0) {
    if (e & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    e >>= 1;
  }
  return result;
}

/// Inverse of a modulo m; throws if gcd(a, m) != 1.
inline i64 invmod(i64 a, i64 m) {
  i64 old_r = mod(a, m), rr = m, old_s = 1, s = 0;
  while (rr != 0) {
    const i64 q = old_r / rr;
    i64 t = old_r - q * rr;
    old_r = rr;
    rr = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  if (old_r != 1 && m != 1) throw InvalidArgument("invmod: " + std::to_string(a) + " not invertible mod " + std::to_string(m));
  return mod(old_s, m);
}

/// Integer power, throwing on overflow of 64-bit signed range.
inline i64 ipow(i64 base, int exp) {
  i64 r = 1;
  for (int i = 0; i < exp; ++i) {
    if (__builtin_mul_overflow(r, base, &r)) throw ArithmeticOverflow("ipow overflow");
  }
  return r;
}

/// Integer power saturating at INT64_MAX (for bounds that only need ordering).
inline i64 ipow_sat(i64 base, i64 exp) {
  i64 r = 1;
  for (i64 i = 0; i < exp; ++i) {
    if (__builtin_mul_overflow(r, base, &r)) return INT64_MAX;
  }
  return r;
}

inline bool is_prime(i64 n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (i64 f = 3; f * f <= n; f += 2)
    if (n % f == 0) return false;
  return true;
}

/// p-adic valuation of a non-zero integer.
inline int vp(i64 a, i64 p) {
  if (a == 0) throw InvalidArgument("vp: valuation of zero");
  int v = 0;
  while (a % p == 0) {
    a /= p;
    ++v;
  }
  return v;
}

/// v_p(a) capped at `cap` (so that a = 0 returns cap).
inline int vp_capped(i64 a, i64 p, int cap) {
  int v = 0;
  while (v < cap && a % p == 0) {
    a /= p;
    ++v;
  }
  return v;
}

/// A prime power p^r whose square still fits in 64 bits.
struct PrimePower {
  i64 p = 2;
  int r = 1;
  i64 value = 2;

  static PrimePower make(i64 p, int r) {
    if (!is_prime(p)) throw InvalidArgument("PrimePower: " + std::to_string(p) + " is not prime");
    if (r < 1) throw InvalidArgument("PrimePower: exponent must be >= 1");
    PrimePower pp{p, r, ipow(p, r)};
    if (pp.value > 3'000'000'000LL) throw ArithmeticOverflow("PrimePower: p^r too large");
    return pp;
  }
};

inline std::vector<PrimePower> factorize(i64 n) {
  if (n < 1) throw InvalidArgument("factorize: n must be positive");
  std::vector<PrimePower> out;
  for (i64 p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int r = 0;
    while (n % p == 0) {
      n /= p;
      ++r;
    }
    out.push_back(PrimePower::make(p, r));
  }
  if (n > 1) out.push_back(PrimePower::make(n, 1));
  return out;
}

inline std::vector<i64> prime_divisors(i64 n) {
  std::vector<i64> out;
  if (n == 0) return out;
  for (const auto& pp : factorize(n < 0 ? -n : n)) out.push_back(pp.p);
  return out;
}

inline std::vector<i64> primes_up_to(i64 limit) {
  std::vector<i64> out;
  for (i64 p = 2; p <= limit; ++p)
    if (is_prime(p)) out.push_back(p);
  return out;
}

inline int mobius(i64 n) {
  int mu = 1;
  for (const auto& pp : factorize(n)) {
    if (pp.r > 1) return 0;
    mu = -mu;
  }
  return mu;
}

inline i64 euler_phi(i64 n) {
  i64 phi = n;
  for (const auto& pp : factorize(n)) phi = phi / pp.p * (pp.p - 1);
  return phi;
}

inline std::vector<i64> divisors(i64 n) {
  std::vector<i64> small, large;
  for (i64 d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    small.push_back(d);
    if (d != n / d) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

// ---------------------------------------------------------------------------
// Characters

/// The non-principal character modulo 4.
constexpr int chi4(i64 d) {
  const i64 r = mod(d, 4);
  return r == 1 ? 1 : (r == 3 ? -1 : 0);
}

/// Jacobi symbol (a/n) for odd n >= 1, by binary reciprocity.
inline int jacobi(i64 a, i64 n) {
  if (n <= 0 || n % 2 == 0) throw InvalidArgument("jacobi: n must be odd and positive");
  a = mod(a, n);
  int t = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const i64 r = n % 8;
      if (r == 3 || r == 5) t = -t;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) t = -t;
    a %= n;
  }
  return n == 1 ? t : 0;
}

/// Legendre symbol chi_p(a) for an odd prime p.
inline int legendre(i64 a, i64 p) { return jacobi(a, p); }

/// 1 for p = 1 mod 4, i for p = 3 mod 4.
inline SumValue eps(i64 p) {
  if (p % 2 == 0 || !is_prime(p)) throw InvalidArgument("eps: p must be an odd prime");
  return p % 4 == 1 ? SumValue::exact({1.0, 0.0}) : SumValue::exact({0.0, 1.0});
}

inline cplx eps_value(i64 p) { return p % 4 == 1 ? cplx{1.0, 0.0} : cplx{0.0, 1.0}; }

// ---------------------------------------------------------------------------
// Roots of unity

/// e_q(k) = exp(2 pi i k / q).
inline cplx unit_root(i64 k, i64 q) {
  const double t = 2.0 * std::numbers::pi * static_cast<double>(mod(k, q)) / static_cast<double>(q);
  return {std::cos(t), std::sin(t)};
}

/// Table of e_q(k) for k = 0..q-1.
class RootTable {
 public:
  explicit RootTable(i64 q) : q_(q), table_(static_cast<std::size_t>(q)) {
    if (q < 1 || q > 10'000'000) throw InvalidArgument("RootTable: modulus out of range");
    for (i64 k = 0; k < q; ++k) table_[static_cast<std::size_t>(k)] = unit_root(k, q);
  }
  i64 modulus() const { return q_; }
  /// k must already be reduced to [0, q).
  const cplx& operator[](i64 k) const { return table_[static_cast<std::size_t>(k)]; }
  cplx at(i64 k) const { return table_[static_cast<std::size_t>(mod(k, q_))]; }

 private:
  i64 q_;
  std::vector<cplx> table_;
};

// ---------------------------------------------------------------------------
// One-dimensional sums

/// Ramanujan sum c_q(a) = sum_{d | (q, a)} d mu(q/d).
inline i64 ramanujan(i64 q, i64 a) {
  if (q < 1) throw InvalidArgument("ramanujan: q must be positive");
  const i64 g = std::gcd(q, a < 0 ? -a : a);
  i64 s = 0;
  for (i64 d : divisors(g)) s += d * mobius(q / d);
  return s;
}

/// g_{p^r}(a) = sum_{x mod p^r} chi_p(x) e_{p^r}(a x), evaluated in closed
/// form: it vanishes unless v_p(a) = r - 1 exactly, in which case it equals
/// p^{r-1} chi_p(a / p^{r-1}) eps(p) sqrt(p).
inline SumValue gauss_chi(const PrimePower& q, i64 a) {
  if (q.p == 2) throw InvalidArgument("gauss_chi: p must be odd");
  const i64 ar = mod(a, q.value);
  const i64 scale = q.value / q.p;  // p^{r-1}
  if (ar % scale != 0) return SumValue::exact(0.0);
  const i64 b = ar / scale;
  if (b % q.p == 0) return SumValue::exact(0.0);
  const double mag = static_cast<double>(scale) * std::sqrt(static_cast<double>(q.p));
  return SumValue::exact(static_cast<double>(legendre(b, q.p)) * eps_value(q.p) * mag);
}

/// sum_{k mod p^r} e_{p^r}(alpha k^2 + m k) by completing the square:
/// e_{p^r}(-(4 alpha)^{-1} m^2) times p^{r/2} (r even) or
/// chi_p(alpha) eps(p) p^{r/2} (r odd).
inline SumValue quad_gauss_1d(const PrimePower& q, i64 alpha, i64 m) {
  if (q.p == 2) throw InvalidArgument("quad_gauss_1d: p must be odd");
  if (alpha % q.p == 0) throw InvalidArgument("quad_gauss_1d: alpha must be coprime to p");
  const double half = std::pow(static_cast<double>(q.p), q.r / 2.0);
  cplx g = q.r % 2 == 0 ? cplx{half, 0.0}
                        : static_cast<double>(legendre(alpha, q.p)) * eps_value(q.p) * half;
  const i64 inv4a = invmod(mulmod(4, alpha, q.value), q.value);
  const i64 phase = mod(-mulmod(inv4a, mulmod(m, m, q.value), q.value), q.value);
  return SumValue::exact(unit_root(phase, q.value) * g);
}

/// Number of (u, v) in Z^2 with u^2 + v^2 = M, by enumeration over u.
inline i64 r2(i64 M) {
  if (M <= 0) throw InvalidArgument("r2: M must be positive");
  i64 count = 0;
  for (i64 u = 0; u * u <= M; ++u) {
    const i64 rest = M - u * u;
    i64 v = static_cast<i64>(std::llround(std::sqrt(static_cast<double>(rest))));
    while (v * v > rest) --v;
    while ((v + 1) * (v + 1) <= rest) ++v;
    if (v * v != rest) continue;
    // (±u, ±v), collapsing signs of zero coordinates
    count += (u == 0 ? 1 : 2) * (v == 0 ? 1 : 2);
  }
  return count;
}

}  // namespace qc
