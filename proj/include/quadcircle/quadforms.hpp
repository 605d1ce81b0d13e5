#pragma once

// Integral quadratic forms Q(x) = x^T M x, pairs (Q1, Q2) with their pencil
// determinant P(b) = det(b1 M1 + b2 M2), the adjoint form Q2*, the set of bad
// primes, and mod-p predicates on the cone V: Q1 = Q2 = 0.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "quadcircle/error.hpp"
#include "quadcircle/exec.hpp"
#include "quadcircle/lincong.hpp"
#include "quadcircle/modarith.hpp"
#include "quadcircle/residue.hpp"

namespace qc {

using bigint = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;

class QuadraticForm {
 public:
  QuadraticForm() = default;
  explicit QuadraticForm(IntegerMatrix M) : M_(std::move(M)) {
    if (!M_.is_symmetric()) throw InvalidArgument("QuadraticForm: matrix must be square and symmetric");
  }

  static QuadraticForm diagonal(const std::vector<i64>& a) { return QuadraticForm(IntegerMatrix::diagonal(a)); }
  static QuadraticForm sum_of_squares(int n) { return QuadraticForm(IntegerMatrix::identity(n)); }

  int n() const { return M_.rows(); }
  const IntegerMatrix& matrix() const { return M_; }
  bool is_diagonal() const { return M_.is_diagonal(); }

  i64 eval(const std::vector<i64>& x) const { return detail::narrow(eval128(x)); }

  i128 eval128(const std::vector<i64>& x) const {
    check_dim(x);
    const int n = this->n();
    i128 s = 0;
    for (int i = 0; i < n; ++i) {
      i128 row = 0;
      for (int j = 0; j < n; ++j) row += static_cast<i128>(M_(i, j)) * x[static_cast<std::size_t>(j)];
      s += row * x[static_cast<std::size_t>(i)];
    }
    return s;
  }

  i64 eval_mod(const std::vector<i64>& x, i64 q) const {
    const i128 v = eval128(x) % q;
    return static_cast<i64>(v < 0 ? v + q : v);
  }

  double eval_real(const std::vector<double>& x) const {
    const int n = this->n();
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) row += static_cast<double>(M_(i, j)) * x[static_cast<std::size_t>(j)];
      s += row * x[static_cast<std::size_t>(i)];
    }
    return s;
  }

  /// The gradient 2 M x.
  std::vector<double> gradient_real(const std::vector<double>& x) const {
    const int n = this->n();
    std::vector<double> g(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g[static_cast<std::size_t>(i)] += 2.0 * static_cast<double>(M_(i, j)) * x[static_cast<std::size_t>(j)];
    return g;
  }

  bool operator==(const QuadraticForm&) const = default;

 private:
  void check_dim(const std::vector<i64>& x) const {
    if (static_cast<int>(x.size()) != n())
      throw InvalidArgument("QuadraticForm: vector of length " + std::to_string(x.size()) + " for a form in " +
                            std::to_string(n()) + " variables");
  }

  IntegerMatrix M_;
};

/// adj(M) = det(M) M^{-1}, by cofactors.
inline IntegerMatrix adjugate(const IntegerMatrix& M) {
  if (!M.square()) throw InvalidArgument("adjugate: matrix not square");
  const int n = M.rows();
  IntegerMatrix adj(n, n);
  if (n == 1) {
    adj(0, 0) = 1;
    return adj;
  }
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<int> rows, cols;
      for (int t : all) {
        if (t != j) rows.push_back(t);
        if (t != i) cols.push_back(t);
      }
      const i64 minor = determinant(M.submatrix(rows, cols));
      adj(i, j) = (i + j) % 2 == 0 ? minor : -minor;
    }
  return adj;
}

/// Q2*: the form whose matrix is the adjugate of M2.
inline QuadraticForm dual_form(const QuadraticForm& Q) {
  if (determinant(Q.matrix()) == 0) throw DomainError("dual_form: form is singular");
  return QuadraticForm(adjugate(Q.matrix()));
}

/// A binary form sum_j c[j] b1^j b2^{deg-j}.
struct BinaryForm {
  std::vector<bigint> c;

  int degree() const { return static_cast<int>(c.size()) - 1; }

  bigint eval(const bigint& b1, const bigint& b2) const {
    bigint s = 0, p1 = 1;
    const int d = degree();
    for (int j = 0; j <= d; ++j) {
      bigint p2 = 1;
      for (int t = 0; t < d - j; ++t) p2 *= b2;
      s += c[static_cast<std::size_t>(j)] * p1 * p2;
      p1 *= b1;
    }
    return s;
  }

  bool is_zero() const {
    return std::all_of(c.begin(), c.end(), [](const bigint& v) { return v == 0; });
  }

  std::string to_string() const {
    std::ostringstream os;
    const int d = degree();
    bool first = true;
    for (int j = d; j >= 0; --j) {
      const bigint& v = c[static_cast<std::size_t>(j)];
      if (v == 0) continue;
      os << (v < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
      const bigint a = v < 0 ? bigint(-v) : v;
      std::vector<std::string> parts;
      if (a != 1 || d == 0) parts.push_back(a.str());
      if (j > 0) parts.push_back(j > 1 ? "b1^" + std::to_string(j) : "b1");
      if (d - j > 0) parts.push_back(d - j > 1 ? "b2^" + std::to_string(d - j) : "b2");
      for (std::size_t t = 0; t < parts.size(); ++t) os << (t ? "*" : "") << parts[t];
      first = false;
    }
    if (first) os << "0";
    return os.str();
  }
};

namespace detail {

/// Fraction-free determinant over arbitrary-precision integers.
inline bigint det_big(std::vector<std::vector<bigint>> a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  bigint prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t piv = n;
      for (std::size_t i = k + 1; i < n; ++i)
        if (a[i][k] != 0) {
          piv = i;
          break;
        }
      if (piv == n) return 0;
      std::swap(a[k], a[piv]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

inline bigint det_pencil(const IntegerMatrix& M1, const IntegerMatrix& M2, const bigint& b1, const bigint& b2) {
  const int n = M1.rows();
  std::vector<std::vector<bigint>> a(static_cast<std::size_t>(n), std::vector<bigint>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = b1 * M1(i, j) + b2 * M2(i, j);
  return det_big(std::move(a));
}

/// Resultant of two univariate polynomials (coefficients low to high) as the
/// Sylvester determinant.
inline bigint resultant(const std::vector<bigint>& f, const std::vector<bigint>& g) {
  const int m = static_cast<int>(f.size()) - 1, k = static_cast<int>(g.size()) - 1;
  const int size = m + k;
  std::vector<std::vector<bigint>> S(static_cast<std::size_t>(size), std::vector<bigint>(static_cast<std::size_t>(size), 0));
  for (int r = 0; r < k; ++r)
    for (int j = 0; j <= m; ++j) S[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + j)] = f[static_cast<std::size_t>(m - j)];
  for (int r = 0; r < m; ++r)
    for (int j = 0; j <= k; ++j) S[static_cast<std::size_t>(k + r)][static_cast<std::size_t>(r + j)] = g[static_cast<std::size_t>(k - j)];
  return det_big(std::move(S));
}

}  // namespace detail

/// P(b) = det(b1 M1 + b2 M2), interpolated from t -> det(t M1 + M2) at
/// t = 0..n and verified at two further points.
inline BinaryForm pencil_det_poly(const QuadraticForm& Q1, const QuadraticForm& Q2) {
  const int n = Q1.n();
  if (Q2.n() != n) throw InvalidArgument("pencil_det_poly: forms have different dimensions");
  const auto& M1 = Q1.matrix();
  const auto& M2 = Q2.matrix();
  // Newton divided differences on nodes 0..n, then expansion to monomials.
  std::vector<rational> dd(static_cast<std::size_t>(n + 1));
  for (int t = 0; t <= n; ++t) dd[static_cast<std::size_t>(t)] = rational(detail::det_pencil(M1, M2, t, 1));
  for (int level = 1; level <= n; ++level)
    for (int i = n; i >= level; --i)
      dd[static_cast<std::size_t>(i)] = (dd[static_cast<std::size_t>(i)] - dd[static_cast<std::size_t>(i - 1)]) / level;
  std::vector<rational> poly(static_cast<std::size_t>(n + 1), rational(0));
  for (int i = n; i >= 0; --i) {
    // poly = poly * (t - i) + dd[i]
    std::vector<rational> next(static_cast<std::size_t>(n + 1), rational(0));
    for (int j = 0; j < n; ++j) {
      next[static_cast<std::size_t>(j + 1)] += poly[static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(j)] -= poly[static_cast<std::size_t>(j)] * i;
    }
    next[0] += dd[static_cast<std::size_t>(i)];
    poly = std::move(next);
  }
  BinaryForm P;
  P.c.resize(static_cast<std::size_t>(n + 1));
  for (int j = 0; j <= n; ++j) {
    const rational& v = poly[static_cast<std::size_t>(j)];
    if (boost::multiprecision::denominator(v) != 1) throw InternalError("pencil_det_poly: non-integral coefficient");
    P.c[static_cast<std::size_t>(j)] = boost::multiprecision::numerator(v);
  }
  for (const auto& [b1, b2] : {std::pair<int, int>{n + 1, 1}, {n + 2, 1}, {1, 0}}) {
    if (P.eval(b1, b2) != detail::det_pencil(M1, M2, b1, b2))
      throw InternalError("pencil_det_poly: interpolation inconsistent at a verification point");
  }
  return P;
}

/// Discriminant of a binary form. A unimodular substitution b2 -> b2 + k b1
/// first moves every root away from [1:0], so the dehomogenised polynomial
/// keeps full degree; the substitution does not change the discriminant.
inline bigint binary_disc(const BinaryForm& P) {
  const int n = P.degree();
  if (n < 2) throw InvalidArgument("binary_disc: degree must be at least 2");
  if (P.is_zero()) return 0;
  int k = 0;
  while (P.eval(1, k) == 0) ++k;
  // Coefficients of f(t) = P(t, 1 + k t), low to high.
  std::vector<bigint> f(static_cast<std::size_t>(n + 1), 0);
  for (int j = 0; j <= n; ++j) {
    // c_j t^j (1 + k t)^{n-j}
    const int e = n - j;
    bigint binom = 1, kpow = 1;
    for (int s = 0; s <= e; ++s) {
      f[static_cast<std::size_t>(j + s)] += P.c[static_cast<std::size_t>(j)] * binom * kpow;
      binom = binom * (e - s) / (s + 1);
      kpow *= k;
    }
  }
  std::vector<bigint> df(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) df[static_cast<std::size_t>(j - 1)] = f[static_cast<std::size_t>(j)] * j;
  const bigint res = detail::resultant(f, df);
  const bigint& lead = f[static_cast<std::size_t>(n)];
  bigint disc = res / lead;
  if ((n * (n - 1) / 2) % 2 == 1) disc = -disc;
  return disc;
}

/// (Q1, Q2) with Q2 non-singular, and the invariants derived from it.
class QuadricPair {
 public:
  QuadricPair(QuadraticForm Q1, QuadraticForm Q2, std::string name = {})
      : Q1_(std::move(Q1)), Q2_(std::move(Q2)), name_(std::move(name)) {
    if (Q1_.n() != Q2_.n()) throw InvalidArgument("QuadricPair: forms have different dimensions");
    if (Q1_.n() < 1) throw InvalidArgument("QuadricPair: dimension must be positive");
    det2_ = determinant(Q2_.matrix());
    if (det2_ == 0) throw DomainError("QuadricPair: Q2 must be non-singular");
    pencil_ = pencil_det_poly(Q1_, Q2_);
    disc_ = n() >= 2 ? binary_disc(pencil_) : bigint(1);
    dual2_ = dual_form(Q2_);
  }

  int n() const { return Q1_.n(); }
  const QuadraticForm& Q1() const { return Q1_; }
  const QuadraticForm& Q2() const { return Q2_; }
  const std::string& name() const { return name_; }
  i64 det2() const { return det2_; }
  const BinaryForm& pencil_poly() const { return pencil_; }
  const bigint& disc_P() const { return disc_; }
  const QuadraticForm& dual2() const { return dual2_; }

  /// M(b) = b1 M1 + b2 M2.
  IntegerMatrix pencil(i64 b1, i64 b2) const { return Q1_.matrix().scaled(b1) + Q2_.matrix().scaled(b2); }

 private:
  QuadraticForm Q1_, Q2_;
  std::string name_;
  i64 det2_ = 0;
  BinaryForm pencil_;
  bigint disc_;
  QuadraticForm dual2_;
};

namespace detail {

inline std::vector<i64> prime_factors_big(bigint v) {
  if (v < 0) v = -v;
  std::vector<i64> out;
  if (v == 0) return out;
  for (i64 p = 2; p <= 1'000'000 && v > 1; ++p) {
    if (v % p != 0) continue;
    out.push_back(p);
    while (v % p == 0) v /= p;
  }
  if (v > 1) {
    if (v >= bigint(1'000'000'000'000LL))
      throw ResourceLimit("bad_primes: discriminant has a cofactor too large to factor by trial division");
    out.push_back(static_cast<i64>(v));  // no factor below 10^6, so prime
  }
  return out;
}

inline i64 dot_mod(const std::vector<i64>& a, const std::vector<i64>& b, i64 p) {
  i64 s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s = mod(s + mulmod(a[i], b[i], p), p);
  return s;
}

}  // namespace detail

/// Primes dividing 2 det(M2) disc(P).
inline std::vector<i64> divisor_bad_primes(const QuadricPair& pair) {
  std::set<i64> s{2};
  for (i64 p : prime_divisors(pair.det2())) s.insert(p);
  for (i64 p : detail::prime_factors_big(pair.disc_P())) s.insert(p);
  return {s.begin(), s.end()};
}

/// Points of P^1(F_p) as representatives (1, t) and (0, 1).
inline std::vector<std::pair<i64, i64>> projective_line(i64 p) {
  std::vector<std::pair<i64, i64>> pts;
  pts.reserve(static_cast<std::size_t>(p + 1));
  for (i64 t = 0; t < p; ++t) pts.emplace_back(1, t);
  pts.emplace_back(0, 1);
  return pts;
}

/// Whether rank M(b) >= n-1 mod p for every [b] in P^1(F_p).
inline bool pencil_rank_ok_mod_p(const QuadricPair& pair, i64 p) {
  for (const auto& [b1, b2] : projective_line(p))
    if (rank_mod_p(pair.pencil(b1, b2), p) < pair.n() - 1) return false;
  return true;
}

/// Smoothness of V mod p (odd p), assuming the pencil rank condition. A
/// singular point x has dependent gradients, so M(b) x = 0 for some [b];
/// then x spans the one-dimensional kernel of that M(b).
inline bool smooth_mod_p_kernel(const QuadricPair& pair, i64 p) {
  for (const auto& [b1, b2] : projective_line(p)) {
    const auto ker = kernel_mod_p(pair.pencil(b1, b2), p);
    if (ker.empty()) continue;
    if (ker.size() > 1) return false;
    const auto& x = ker.front();
    if (pair.Q1().eval_mod(x, p) == 0 && pair.Q2().eval_mod(x, p) == 0) return false;
  }
  return true;
}

/// Smoothness of V mod p by enumerating F_p^n: at each non-zero common zero
/// the gradients 2 M1 x, 2 M2 x must be independent.
inline bool smooth_mod_p_full(const QuadricPair& pair, i64 p, const ExecPolicy& policy = {}) {
  const int n = pair.n();
  check_guard(std::pow(static_cast<double>(p), n), policy, "smooth_mod_p_full");
  const auto& M1 = pair.Q1().matrix();
  const auto& M2 = pair.Q2().matrix();
  const auto bad = map_slabs<int>(static_cast<std::size_t>(p), policy.workers, [&](std::size_t slab) {
    ResidueWalker w(n, p, {{&M1, p}, {&M2, p}}, {}, {static_cast<i64>(slab)});
    do {
      if (w.value(0) != 0 || w.value(1) != 0) continue;
      const auto& x = w.k();
      if (std::all_of(x.begin(), x.end(), [](i64 v) { return v == 0; })) continue;
      IntegerMatrix J(2, n);
      const auto g1 = M1.apply(x), g2 = M2.apply(x);
      for (int j = 0; j < n; ++j) {
        J(0, j) = mod(2 * g1[static_cast<std::size_t>(j)], p);
        J(1, j) = mod(2 * g2[static_cast<std::size_t>(j)], p);
      }
      if (rank_mod_p(J, p) < 2) return 1;
    } while (w.next());
    return 0;
  });
  return std::none_of(bad.begin(), bad.end(), [](int b) { return b != 0; });
}

/// The divisor-based bad primes together with every p <= p_max at which a
/// mod-p check fails: the pencil rank condition or smoothness of V.
inline std::vector<i64> bad_primes(const QuadricPair& pair, i64 p_max) {
  if (p_max < 2) throw InvalidArgument("bad_primes: p_max must be at least 2");
  std::set<i64> s;
  for (i64 p : divisor_bad_primes(pair)) s.insert(p);
  for (i64 p : primes_up_to(p_max)) {
    if (s.count(p)) continue;
    if (!pencil_rank_ok_mod_p(pair, p) || !smooth_mod_p_kernel(pair, p)) s.insert(p);
  }
  return {s.begin(), s.end()};
}

/// An odd prime p <= p_max that is not in bad_primes(pair, p_max).
inline bool certified_good(const QuadricPair& pair, i64 p, i64 p_max = 0) {
  if (p_max < p) p_max = p;
  const auto bad = bad_primes(pair, p_max);
  return is_prime(p) && !std::binary_search(bad.begin(), bad.end(), p);
}

/// #{x mod p : Q1(x) = Q2(x) = 0 mod p}, the origin included.
inline i64 count_cone_points_mod_p(const QuadricPair& pair, i64 p, ExecPolicy policy = {}) {
  if (!is_prime(p)) throw InvalidArgument("count_cone_points_mod_p: p must be prime");
  policy.guard = std::min(policy.guard, 1e8);
  const int n = pair.n();
  check_guard(std::pow(static_cast<double>(p), n), policy, "count_cone_points_mod_p");
  const auto& M1 = pair.Q1().matrix();
  const auto& M2 = pair.Q2().matrix();
  const auto counts = map_slabs<i64>(static_cast<std::size_t>(p), policy.workers, [&](std::size_t slab) {
    ResidueWalker w(n, p, {{&M1, p}, {&M2, p}}, {}, {static_cast<i64>(slab)});
    i64 c = 0;
    do c += (w.value(0) == 0 && w.value(1) == 0);
    while (w.next());
    return c;
  });
  i64 total = 0;
  for (i64 c : counts) total += c;
  return total;
}

/// The mod-p stand-in for p | G(m): some x != 0 on V_m = V cut by m.x = 0
/// where (grad Q1(x); grad Q2(x); m) has rank below 3.
inline bool is_Vm_singular_mod_p(const QuadricPair& pair, const std::vector<i64>& m, i64 p, const ExecPolicy& policy = {}) {
  const int n = pair.n();
  if (!is_prime(p)) throw InvalidArgument("is_Vm_singular_mod_p: p must be prime");
  if (static_cast<int>(m.size()) != n) throw InvalidArgument("is_Vm_singular_mod_p: m has the wrong length");
  if (std::all_of(m.begin(), m.end(), [p](i64 v) { return mod(v, p) == 0; }))
    throw InvalidArgument("is_Vm_singular_mod_p: requires p not dividing m");
  check_guard(std::pow(static_cast<double>(p), n), policy, "is_Vm_singular_mod_p");
  const auto& M1 = pair.Q1().matrix();
  const auto& M2 = pair.Q2().matrix();
  const auto hits = map_slabs<int>(static_cast<std::size_t>(p), policy.workers, [&](std::size_t slab) {
    ResidueWalker w(n, p, {{&M1, p}, {&M2, p}}, m, {static_cast<i64>(slab)});
    do {
      if (w.value(0) != 0 || w.value(1) != 0 || w.linear() != 0) continue;
      const auto& x = w.k();
      if (std::all_of(x.begin(), x.end(), [](i64 v) { return v == 0; })) continue;
      IntegerMatrix J(3, n);
      const auto g1 = M1.apply(x), g2 = M2.apply(x);
      for (int j = 0; j < n; ++j) {
        J(0, j) = mod(2 * g1[static_cast<std::size_t>(j)], p);
        J(1, j) = mod(2 * g2[static_cast<std::size_t>(j)], p);
        J(2, j) = mod(m[static_cast<std::size_t>(j)], p);
      }
      if (rank_mod_p(J, p) < 3) return 1;
    } while (w.next());
    return 0;
  });
  return std::any_of(hits.begin(), hits.end(), [](int h) { return h != 0; });
}

// ---------------------------------------------------------------------------
// Pair files

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<i64> parse_int_list(const std::string& text, const std::string& key) {
  std::vector<i64> out;
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    std::size_t used = 0;
    i64 v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ParseError(key + ": '" + tok + "' is not an integer");
    out.push_back(v);
    tok.clear();
  };
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',' || ch == ';' || ch == '[' || ch == ']') flush();
    else tok.push_back(ch);
  }
  flush();
  return out;
}

/// Parses e.g. "x1^2 + 2*x2^2 - 4*x1*x3" into a symmetric matrix.
inline IntegerMatrix parse_poly(const std::string& text, int n, const std::string& key) {
  IntegerMatrix M(n, n);
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw ParseError(key + ": empty polynomial");
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) { throw ParseError(key + ": " + why + " near position " + std::to_string(pos)); };
  auto read_var = [&]() -> int {
    if (pos >= s.size() || s[pos] != 'x') fail("expected a variable x<i>");
    ++pos;
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (start == pos) fail("variable index missing");
    const int idx = std::stoi(s.substr(start, pos - start));
    if (idx < 1 || idx > n) fail("variable index out of range");
    return idx - 1;
  };
  while (pos < s.size()) {
    i64 sign = 1;
    if (s[pos] == '+' || s[pos] == '-') {
      sign = s[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (pos != 0) {
      fail("expected '+' or '-'");
    }
    i64 coef = 1;
    if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      coef = std::stoll(s.substr(start, pos - start));
      if (pos < s.size() && s[pos] == '*') ++pos;
    }
    std::vector<int> vars;
    for (;;) {
      const int v = read_var();
      int power = 1;
      if (pos < s.size() && s[pos] == '^') {
        ++pos;
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) fail("exponent missing");
        power = s[pos] - '0';
        ++pos;
      }
      for (int t = 0; t < power; ++t) vars.push_back(v);
      if (pos < s.size() && s[pos] == '*') {
        ++pos;
        continue;
      }
      break;
    }
    if (vars.size() != 2) fail("every monomial must have degree 2");
    const i64 c = sign * coef;
    if (vars[0] == vars[1]) {
      M(vars[0], vars[0]) += c;
    } else {
      if (c % 2 != 0)
        fail("odd cross term coefficient " + std::to_string(c) + " on x" + std::to_string(vars[0] + 1) + "*x" +
             std::to_string(vars[1] + 1) + " (forms are x^T M x with integral M, so cross terms must be even)");
      M(vars[0], vars[1]) += c / 2;
      M(vars[1], vars[0]) += c / 2;
    }
  }
  return M;
}

}  // namespace detail

/// Reads the key-value pair format:
///
///     # comment
///     n = 3
///     Q1.matrix = 1 0 0  0 1 0  0 0 1
///     Q2.poly   = x1^2 + 2*x2^2 - 3*x3^2
///
/// A line without '=' continues the previous value.
inline QuadricPair parse_pair(const std::string& text, const std::string& source = "<pair>") {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::string last_key;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      // continuation of a multi-line value
      if (last_key.empty()) throw ParseError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
      kv[last_key] += " " + line;
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(source + ":" + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) throw ParseError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = detail::trim(line.substr(eq + 1));
    last_key = key;
  }
  static const std::set<std::string> known{"n", "name", "Q1.matrix", "Q2.matrix", "Q1.poly", "Q2.poly"};
  for (const auto& [k, v] : kv)
    if (!known.count(k)) throw ParseError(source + ": unknown key '" + k + "'");
  if (!kv.count("n")) throw ParseError(source + ": missing key 'n'");
  const auto nv = detail::parse_int_list(kv["n"], "n");
  if (nv.size() != 1 || nv[0] < 1 || nv[0] > 16) throw ParseError(source + ": n must be a single integer in [1, 16]");
  const int n = static_cast<int>(nv[0]);
  auto form = [&](const std::string& which) {
    const bool hm = kv.count(which + ".matrix"), hp = kv.count(which + ".poly");
    if (hm == hp) throw ParseError(source + ": give exactly one of " + which + ".matrix or " + which + ".poly");
    IntegerMatrix M;
    if (hm) {
      const auto entries = detail::parse_int_list(kv[which + ".matrix"], which + ".matrix");
      if (static_cast<int>(entries.size()) != n * n)
        throw ParseError(source + ": " + which + ".matrix needs " + std::to_string(n * n) + " entries, found " +
                         std::to_string(entries.size()));
      M = IntegerMatrix::from_row_major(n, n, entries);
      if (!M.is_symmetric()) throw ParseError(source + ": " + which + ".matrix is not symmetric");
    } else {
      M = detail::parse_poly(kv[which + ".poly"], n, which + ".poly");
    }
    return QuadraticForm(M);
  };
  QuadraticForm Q1 = form("Q1"), Q2 = form("Q2");
  try {
    return QuadricPair(std::move(Q1), std::move(Q2), kv.count("name") ? kv["name"] : std::string{});
  } catch (const DomainError& e) {
    throw ParseError(source + ": " + e.what());
  }
}

inline QuadricPair load_pair(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open pair file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_pair(ss.str(), path);
}

inline std::string format_pair(const QuadricPair& pair) {
  std::ostringstream os;
  if (!pair.name().empty()) os << "name = " << pair.name() << "\n";
  os << "n = " << pair.n() << "\n";
  auto dump = [&](const char* key, const IntegerMatrix& M) {
    os << key << " =";
    for (i64 v : M.entries()) os << ' ' << v;
    os << "\n";
  };
  dump("Q1.matrix", pair.Q1().matrix());
  dump("Q2.matrix", pair.Q2().matrix());
  return os.str();
}

}  // namespace qc
