#pragma once

// Exponential sums over residue systems attached to a quadric pair:
//
//   S_{d,q}(m) = sum*_{a mod q} sum_{k mod dq, d | Q1(k), d | Q2(k)} e_{dq}(a Q2(k) + m.k)
//
// and its relatives Q_q = S_{1,q}, D_d = S_{d,1}, M_{d,q}, T_{d,q} and the
// two-power sums S^{+-}_{1,2^l}.

#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "quadcircle/error.hpp"
#include "quadcircle/exec.hpp"
#include "quadcircle/lincong.hpp"
#include "quadcircle/modarith.hpp"
#include "quadcircle/quadforms.hpp"
#include "quadcircle/residue.hpp"

namespace qc {

struct ExpSumParams {
  const QuadricPair* pair = nullptr;
  i64 d = 1;
  i64 q = 1;
  std::vector<i64> m;
};

enum class SumRoute { Auto, Direct, Ramanujan, Diagonal };

namespace detail {

inline std::vector<i64> units_mod(i64 q) {
  std::vector<i64> u;
  for (i64 a = 0; a < q; ++a)
    if (std::gcd(a, q) == 1) u.push_back(a);
  return u;
}

inline void check_dq(const QuadricPair& pair, i64 d, i64 q, const std::vector<i64>& m, const char* what) {
  if (d < 1 || q < 1) throw InvalidArgument(std::string(what) + ": d and q must be positive");
  if (static_cast<int>(m.size()) != pair.n())
    throw InvalidArgument(std::string(what) + ": m has length " + std::to_string(m.size()) + ", expected " +
                          std::to_string(pair.n()));
  if (d > 3'000'000'000LL / q) throw ArithmeticOverflow(std::string(what) + ": modulus dq too large");
}

inline double powd(i64 base, int e) { return std::pow(static_cast<double>(base), e); }

/// Slab decomposition over the leading coordinate (or a single slab when n = 0).
template <class Body>
cplx sum_slabs(int n, i64 N, unsigned workers, Body&& body) {
  const std::size_t slabs = n > 0 ? static_cast<std::size_t>(N) : 1;
  const auto parts = map_slabs<cplx>(slabs, workers, [&](std::size_t s) { return body(static_cast<i64>(s)); });
  cplx total = 0.0;
  for (const auto& z : parts) total += z;
  return total;
}

/// i^k
inline cplx ipow_i(i64 k) {
  switch (mod(k, 4)) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

/// eps(p)^k
inline cplx eps_pow(i64 p, i64 k) { return p % 4 == 1 ? cplx{1.0, 0.0} : ipow_i(k); }

}  // namespace detail

/// Defining double sum over a and k.
inline SumValue S_dq_direct(const QuadricPair& pair, i64 d, i64 q, const std::vector<i64>& m, const ExecPolicy& policy = {}) {
  detail::check_dq(pair, d, q, m, "S_dq");
  const int n = pair.n();
  const i64 N = d * q;
  const auto units = detail::units_mod(q);
  const double terms = detail::powd(N, n) * static_cast<double>(units.size());
  check_guard(terms, policy, "S_dq (direct)");
  const RootTable e(N);
  const auto& M1 = pair.Q1().matrix();
  const auto& M2 = pair.Q2().matrix();
  const cplx total = detail::sum_slabs(n, N, policy.workers, [&](i64 slab) {
    std::vector<i64> prefix;
    if (n > 0) prefix.push_back(slab);
    ResidueWalker w(n, N, {{&M1, d}, {&M2, N}}, m, prefix);
    cplx s = 0.0;
    do {
      const i64 q2 = w.value(1);
      if (w.value(0) != 0 || q2 % d != 0) continue;
      const i64 lin = w.linear();
      for (i64 a : units) s += e[(a * q2 + lin) % N];
    } while (w.next());
    return s;
  });
  return {total, detail::direct_tol(terms, 1.0)};
}

/// The sum over a collapses to a Ramanujan sum: sum_k c_q(Q2(k)/d) e_{dq}(m.k).
inline SumValue S_dq_ramanujan(const QuadricPair& pair, i64 d, i64 q, const std::vector<i64>& m, const ExecPolicy& policy = {}) {
  detail::check_dq(pair, d, q, m, "S_dq");
  const int n = pair.n();
  const i64 N = d * q;
  const double terms = detail::powd(N, n);
  check_guard(terms, policy, "S_dq (Ramanujan route)");
  const RootTable e(N);
  std::vector<double> c(static_cast<std::size_t>(q));
  for (i64 v = 0; v < q; ++v) c[static_cast<std::size_t>(v)] = static_cast<double>(ramanujan(q, v));
  const auto& M1 = pair.Q1().matrix();
  const auto& M2 = pair.Q2().matrix();
  const cplx total = detail::sum_slabs(n, N, policy.workers, [&](i64 slab) {
    std::vector<i64> prefix;
    if (n > 0) prefix.push_back(slab);
    ResidueWalker w(n, N, {{&M1, d}, {&M2, N}}, m, prefix);
    cplx s = 0.0;
    do {
      const i64 q2 = w.value(1);
      if (w.value(0) != 0 || q2 % d != 0) continue;
      const double cq = c[static_cast<std::size_t>(q2 / d)];
      if (cq != 0.0) s += cq * e[w.linear()];
    } while (w.next());
    return s;
  });
  return {total, detail::direct_tol(terms, static_cast<double>(euler_phi(q)))};
}

/// For d = 1 and diagonal Q2 the k-sum factors into one-dimensional sums:
/// Q_q(m) = sum*_a prod_i sum_{k mod q} e_q(a alpha_i k^2 + m_i k).
inline SumValue S_dq_diagonal(const QuadricPair& pair, i64 q, const std::vector<i64>& m, const ExecPolicy& policy = {}) {
  detail::check_dq(pair, 1, q, m, "S_dq");
  if (!pair.Q2().is_diagonal()) throw InvalidArgument("S_dq: factorized path needs a diagonal Q2");
  const int n = pair.n();
  const auto units = detail::units_mod(q);
  const double terms = static_cast<double>(units.size()) * static_cast<double>(n) * static_cast<double>(q);
  check_guard(terms, policy, "S_dq (factorized)");
  const RootTable e(q);
  const auto& M2 = pair.Q2().matrix();
  cplx total = 0.0;
  double mag = 0.0;
  for (i64 a : units) {
    cplx prod = 1.0;
    double pm = 1.0;
    for (int i = 0; i < n; ++i) {
      const i64 alpha = mod(mulmod(a, M2(i, i), q), q);
      const i64 mi = mod(m[static_cast<std::size_t>(i)], q);
      cplx s = 0.0;
      for (i64 k = 0; k < q; ++k) s += e[mod(mulmod(alpha, mulmod(k, k, q), q) + mulmod(mi, k, q), q)];
      prod *= s;
      pm *= std::max(std::abs(s), 1.0);
    }
    total += prod;
    mag += pm;
  }
  return {total, 1e-9 * std::sqrt(static_cast<double>(n * q)) * std::max(mag, 1.0)};
}

/// S_{d,q}(m). Auto uses the defining sum when it fits the guard, falling
/// back to the factorized path for diagonal Q2 and d = 1.
inline SumValue S_dq(const QuadricPair& pair, i64 d, i64 q, const std::vector<i64>& m, const ExecPolicy& policy = {},
                     SumRoute route = SumRoute::Auto) {
  switch (route) {
    case SumRoute::Direct: return S_dq_direct(pair, d, q, m, policy);
    case SumRoute::Ramanujan: return S_dq_ramanujan(pair, d, q, m, policy);
    case SumRoute::Diagonal:
      if (d != 1) throw InvalidArgument("S_dq: factorized path needs d = 1");
      return S_dq_diagonal(pair, q, m, policy);
    case SumRoute::Auto: break;
  }
  detail::check_dq(pair, d, q, m, "S_dq");
  const double direct_work = detail::powd(d * q, pair.n()) * static_cast<double>(euler_phi(q));
  if (direct_work <= policy.guard) return S_dq_direct(pair, d, q, m, policy);
  if (d == 1 && pair.Q2().is_diagonal()) return S_dq_diagonal(pair, q, m, policy);
  return S_dq_direct(pair, d, q, m, policy);  // raises the guard error
}

inline SumValue S_dq(const ExpSumParams& params, const ExecPolicy& policy = {}, SumRoute route = SumRoute::Auto) {
  if (!params.pair) throw InvalidArgument("S_dq: no pair given");
  return S_dq(*params.pair, params.d, params.q, params.m, policy, route);
}

inline SumValue Q_q(const QuadricPair& pair, i64 q, const std::vector<i64>& m, const ExecPolicy& policy = {},
                    SumRoute route = SumRoute::Auto) {
  return S_dq(pair, 1, q, m, policy, route);
}

inline SumValue D_d(const QuadricPair& pair, i64 d, const std::vector<i64>& m, const ExecPolicy& policy = {},
                    SumRoute route = SumRoute::Auto) {
  return S_dq(pair, d, 1, m, policy, route);
}

/// Closed form for Q_q(m) when gcd(q, 2 det M2) = 1, as a product over the
/// prime powers p^r || q of
///   n even:         eps(p)^{nr} chi_p(det M2)^r p^{nr/2} c_{p^r}(Q2*(m))
///   n odd, r even:  p^{nr/2} c_{p^r}(Q2*(m))
///   n odd, r odd:   eps(p)^n chi_p(-1) p^{nr/2} g_{p^r}(Q2*(m))
inline SumValue Q_q_explicit(const QuadraticForm& Q2, i64 q, const std::vector<i64>& m) {
  if (q < 1) throw InvalidArgument("Q_q_explicit: q must be positive");
  const int n = Q2.n();
  if (static_cast<int>(m.size()) != n) throw InvalidArgument("Q_q_explicit: m has the wrong length");
  const i64 det = determinant(Q2.matrix());
  if (det == 0) throw DomainError("Q_q_explicit: Q2 is singular");
  if (std::gcd(q, 2 * (det < 0 ? -det : det)) != 1)
    throw DomainError("Q_q_explicit: q must be coprime to 2 det M2");
  SumValue value = SumValue::exact(1.0);
  if (q == 1) return value;
  const QuadraticForm dual = dual_form(Q2);
  for (const auto& pp : factorize(q)) {
    const i64 p = pp.p;
    const int r = pp.r;
    const i64 s = dual.eval_mod(m, pp.value);
    const double scale = std::pow(static_cast<double>(p), n * r / 2.0);
    cplx f;
    if (n % 2 == 0) {
      const int chi = legendre(det, p);
      const double chir = (r % 2 == 0) ? 1.0 : static_cast<double>(chi);
      f = detail::eps_pow(p, static_cast<i64>(n) * r) * chir * scale * static_cast<double>(ramanujan(pp.value, s));
    } else if (r % 2 == 0) {
      f = scale * static_cast<double>(ramanujan(pp.value, s));
    } else {
      f = detail::eps_pow(p, n) * static_cast<double>(legendre(-1, p)) * scale * gauss_chi(pp, s).value();
    }
#ifdef QC_INJECT_SIGN_FAULT
    f = -f;
#endif
    value = value * SumValue::exact(f);
  }
  return value;
}

/// S^{sign}_{1,2^l}(m) = sum*_{a mod 2^l} sum_{k mod 2^{l+2}, k = sign a_vec mod 4}
///                       e_{2^{l+2}}(4 a Q2(k) + m.k).
inline SumValue S_two_power(const QuadricPair& pair, const std::vector<i64>& a_vec, int ell, int sign,
                            const std::vector<i64>& m, const ExecPolicy& policy = {}) {
  const int n = pair.n();
  if (static_cast<int>(a_vec.size()) != n || static_cast<int>(m.size()) != n)
    throw InvalidArgument("S_two_power: a_vec and m must have length n");
  if (ell < 0 || ell > 28) throw InvalidArgument("S_two_power: ell out of range");
  if (sign != 1 && sign != -1) throw InvalidArgument("S_two_power: sign must be +1 or -1");
  if (pair.Q1().eval_mod(a_vec, 4) != 1) throw InvalidArgument("S_two_power: requires Q1(a_vec) = 1 mod 4");
  const i64 L = i64{1} << ell;
  const i64 N = 4 * L;
  const auto units = detail::units_mod(L);
  const double terms = detail::powd(L, n) * static_cast<double>(units.size());
  check_guard(terms, policy, "S_two_power");
  const RootTable e(N);
  std::vector<i64> base(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) base[static_cast<std::size_t>(i)] = mod(sign * a_vec[static_cast<std::size_t>(i)], 4);
  // k = base + 4 j with j over (Z/LZ)^n
  std::vector<i64> j(static_cast<std::size_t>(n), 0), k(static_cast<std::size_t>(n));
  cplx total = 0.0;
  for (;;) {
    for (int i = 0; i < n; ++i) k[static_cast<std::size_t>(i)] = base[static_cast<std::size_t>(i)] + 4 * j[static_cast<std::size_t>(i)];
    const i64 q2 = pair.Q2().eval_mod(k, L);
    i64 lin = 0;
    for (int i = 0; i < n; ++i) lin = mod(lin + mulmod(m[static_cast<std::size_t>(i)], k[static_cast<std::size_t>(i)], N), N);
    for (i64 a : units) total += e[mod(4 * mulmod(a, q2, L) + lin, N)];
    int i = n - 1;
    while (i >= 0 && ++j[static_cast<std::size_t>(i)] == L) j[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
  }
  return {total, detail::direct_tol(terms, 1.0)};
}

/// T_{d,q}(m) = sum*_{a mod q} sum_{k mod 4dq, k = a_vec mod 4, d | Q1(k), d | Q2(k)}
///              e_{4dq}(4 a Q2(k) + m.k), for odd d.
inline SumValue T_dq(const QuadricPair& pair, const std::vector<i64>& a_vec, i64 d, i64 q, const std::vector<i64>& m,
                     const ExecPolicy& policy = {}) {
  detail::check_dq(pair, d, q, m, "T_dq");
  if (d % 2 == 0) throw InvalidArgument("T_dq: d must be odd");
  const int n = pair.n();
  if (static_cast<int>(a_vec.size()) != n) throw InvalidArgument("T_dq: a_vec must have length n");
  const i64 N = d * q;
  const i64 N4 = 4 * N;
  const auto units = detail::units_mod(q);
  const double terms = detail::powd(N, n) * static_cast<double>(units.size());
  check_guard(terms, policy, "T_dq");
  const RootTable e(N4);
  std::vector<i64> j(static_cast<std::size_t>(n), 0), k(static_cast<std::size_t>(n));
  cplx total = 0.0;
  for (;;) {
    for (int i = 0; i < n; ++i) k[static_cast<std::size_t>(i)] = mod(a_vec[static_cast<std::size_t>(i)], 4) + 4 * j[static_cast<std::size_t>(i)];
    const i64 q2 = pair.Q2().eval_mod(k, N);
    if (q2 % d == 0 && pair.Q1().eval_mod(k, d) == 0) {
      i64 lin = 0;
      for (int i = 0; i < n; ++i) lin = mod(lin + mulmod(m[static_cast<std::size_t>(i)], k[static_cast<std::size_t>(i)], N4), N4);
      for (i64 a : units) total += e[mod(4 * mulmod(a, q2, N) + lin, N4)];
    }
    int i = n - 1;
    while (i >= 0 && ++j[static_cast<std::size_t>(i)] == N) j[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
  }
  return {total, detail::direct_tol(terms, 1.0)};
}

/// The right-hand side of the factorization of T_{d,q}: with q = 2^l q', q'
/// odd, S_{d,q'}(m) S^{chi(dq')}_{1,2^l}(m).
inline SumValue T_dq_factorized(const QuadricPair& pair, const std::vector<i64>& a_vec, i64 d, i64 q,
                                const std::vector<i64>& m, const ExecPolicy& policy = {}) {
  if (d % 2 == 0) throw InvalidArgument("T_dq_factorized: d must be odd");
  int ell = 0;
  i64 qo = q;
  while (qo % 2 == 0) {
    qo /= 2;
    ++ell;
  }
  const int sign = chi4(d * qo);
  return S_dq_direct(pair, d, qo, m, policy) * S_two_power(pair, a_vec, ell, sign, m, policy);
}

/// rho(d) = #{k mod d : Q1(k) = Q2(k) = 0 mod d}, which is D_d(0).
inline i64 rho(const QuadricPair& pair, i64 d, const ExecPolicy& policy = {}) {
  if (d < 1) throw InvalidArgument("rho: d must be positive");
  const int n = pair.n();
  check_guard(detail::powd(d, n), policy, "rho");
  const auto& M1 = pair.Q1().matrix();
  const auto& M2 = pair.Q2().matrix();
  const auto parts = map_slabs<i64>(static_cast<std::size_t>(d), policy.workers, [&](std::size_t slab) {
    ResidueWalker w(n, d, {{&M1, d}, {&M2, d}}, {}, {static_cast<i64>(slab)});
    i64 c = 0;
    do c += (w.value(0) == 0 && w.value(1) == 0);
    while (w.next());
    return c;
  });
  return std::accumulate(parts.begin(), parts.end(), i64{0});
}

/// rho*(d): as rho(d) but only over k with gcd(d, k_1, ..., k_n) = 1.
inline i64 rho_star(const QuadricPair& pair, i64 d, const ExecPolicy& policy = {}) {
  if (d < 1) throw InvalidArgument("rho_star: d must be positive");
  const int n = pair.n();
  check_guard(detail::powd(d, n), policy, "rho_star");
  const auto& M1 = pair.Q1().matrix();
  const auto& M2 = pair.Q2().matrix();
  const auto primes = prime_divisors(d);
  const auto parts = map_slabs<i64>(static_cast<std::size_t>(d), policy.workers, [&](std::size_t slab) {
    ResidueWalker w(n, d, {{&M1, d}, {&M2, d}}, {}, {static_cast<i64>(slab)});
    i64 c = 0;
    do {
      if (w.value(0) != 0 || w.value(1) != 0) continue;
      bool primitive = true;
      for (i64 p : primes) {
        bool all = true;
        for (i64 v : w.k())
          if (v % p != 0) {
            all = false;
            break;
          }
        if (all) {
          primitive = false;
          break;
        }
      }
      c += primitive;
    } while (w.next());
    return c;
  });
  return std::accumulate(parts.begin(), parts.end(), i64{0});
}

/// Right-hand side of the layering identity
///   rho(p^r) = sum_{0 <= k < r/2} p^{kn} rho*(p^{r-2k}) + p^{(r - ceil(r/2)) n}.
inline i64 rho_layered(const QuadricPair& pair, const PrimePower& q, const ExecPolicy& policy = {}) {
  const int n = pair.n();
  i64 total = 0;
  for (int k = 0; 2 * k < q.r; ++k)
    total = detail::checked_add(total, detail::checked_mul(ipow(q.p, k * n), rho_star(pair, ipow(q.p, q.r - 2 * k), policy)));
  return detail::checked_add(total, ipow(q.p, (q.r - (q.r + 1) / 2) * n));
}

/// M_{p^r,p^l}(m) through the split k = y + p^r z: the congruences mod p^r
/// only see y, so the inner sum runs over the rho(p^r) admissible y alone.
inline SumValue M_mixed(const QuadricPair& pair, i64 p, int r, int ell, const std::vector<i64>& m, const ExecPolicy& policy = {}) {
  if (r < 1 || ell < 1) throw InvalidArgument("M_mixed: r and ell must be at least 1");
  const PrimePower d = PrimePower::make(p, r), q = PrimePower::make(p, ell);
  detail::check_dq(pair, d.value, q.value, m, "M_mixed");
  const int n = pair.n();
  const i64 N = d.value * q.value;
  check_guard(detail::powd(d.value, n), policy, "M_mixed");
  const auto& M1 = pair.Q1().matrix();
  const auto& M2 = pair.Q2().matrix();
  std::vector<std::vector<i64>> ys;
  {
    ResidueWalker w(n, d.value, {{&M1, d.value}, {&M2, d.value}}, {}, {});
    do
      if (w.value(0) == 0 && w.value(1) == 0) ys.push_back(w.k());
    while (w.next());
  }
  const auto units = detail::units_mod(q.value);
  const double terms = static_cast<double>(ys.size()) * detail::powd(q.value, n) * static_cast<double>(units.size());
  check_guard(terms, policy, "M_mixed");
  const RootTable e(N);
  const auto parts = map_slabs<cplx>(ys.size(), policy.workers, [&](std::size_t idx) {
    const auto& y = ys[idx];
    std::vector<i64> z(static_cast<std::size_t>(n), 0), k(static_cast<std::size_t>(n));
    cplx s = 0.0;
    for (;;) {
      for (int i = 0; i < n; ++i) k[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] + d.value * z[static_cast<std::size_t>(i)];
      const i64 q2 = pair.Q2().eval_mod(k, N);
      i64 lin = 0;
      for (int i = 0; i < n; ++i) lin = mod(lin + mulmod(m[static_cast<std::size_t>(i)], k[static_cast<std::size_t>(i)], N), N);
      for (i64 a : units) s += e[mod(mulmod(a, q2, N) + lin, N)];
      int i = n - 1;
      while (i >= 0 && ++z[static_cast<std::size_t>(i)] == q.value) z[static_cast<std::size_t>(i--)] = 0;
      if (i < 0) break;
    }
    return s;
  });
  cplx total = 0.0;
  for (const auto& z : parts) total += z;
  return {total, detail::direct_tol(terms, 1.0)};
}

/// sum_{k mod q} e_q(Q(k) + m.k), the complete quadratic exponential sum.
inline SumValue complete_quadratic_sum(const QuadraticForm& Q, const std::vector<i64>& m, i64 q, const ExecPolicy& policy = {}) {
  const int n = Q.n();
  if (static_cast<int>(m.size()) != n) throw InvalidArgument("complete_quadratic_sum: m has the wrong length");
  const double terms = detail::powd(q, n);
  check_guard(terms, policy, "complete_quadratic_sum");
  const RootTable e(q);
  const auto& M = Q.matrix();
  const cplx total = detail::sum_slabs(n, q, policy.workers, [&](i64 slab) {
    std::vector<i64> prefix;
    if (n > 0) prefix.push_back(slab);
    ResidueWalker w(n, q, {{&M, q}}, m, prefix);
    cplx s = 0.0;
    do s += e[(w.value(0) + w.linear()) % q];
    while (w.next());
    return s;
  });
  return {total, detail::direct_tol(terms, 1.0)};
}

/// N = 2 det(M2) Q2*(m) when Q2*(m) != 0, and 2 det(M2) otherwise.
inline i64 conductor_N(const QuadraticForm& Q2, const std::vector<i64>& m) {
  const i64 det = determinant(Q2.matrix());
  const i64 dual = dual_form(Q2).eval(m);
  return dual != 0 ? detail::checked_mul(2 * det, dual) : 2 * det;
}

struct PartialSums {
  std::vector<i64> q;           // the moduli summed, in order
  std::vector<cplx> running;    // sum over the first i+1 moduli
  std::vector<double> abs_sum;  // running sum of |Q_q(m)|
  SumValue total;
};

/// sum_{q <= x, (q, M) = 1} Q_q(m), evaluated with the closed form.
inline PartialSums partial_sum_Q(const QuadraticForm& Q2, i64 x, const std::vector<i64>& m, i64 M) {
  const i64 N = conductor_N(Q2, m);
  if (M == 0 || M % N != 0) throw InvalidArgument("partial_sum_Q: M must be divisible by N = " + std::to_string(N));
  PartialSums out;
  cplx acc = 0.0;
  double abs_acc = 0.0, tol = 0.0;
  for (i64 q = 1; q <= x; ++q) {
    if (std::gcd(q, M) != 1) continue;
    const SumValue v = Q_q_explicit(Q2, q, m);
    acc += v.value();
    abs_acc += v.abs();
    tol += v.tol;
    out.q.push_back(q);
    out.running.push_back(acc);
    out.abs_sum.push_back(abs_acc);
  }
  if (out.q.empty()) {
    out.total = SumValue::exact(0.0);
  } else {
    out.total = {acc, std::max(tol, 1e-12)};
  }
  return out;
}

}  // namespace qc
