#pragma once

// Local densities of X : Q1(x) = u^2 + v^2, Q2(x) = 0, the truncated
// singular product and the comparison with S(B).

#include <boost/math/quadrature/gauss.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "quadcircle/counting.hpp"
#include "quadcircle/error.hpp"
#include "quadcircle/exec.hpp"
#include "quadcircle/modarith.hpp"
#include "quadcircle/quadforms.hpp"
#include "quadcircle/residue.hpp"

namespace qc {

// ---------------------------------------------------------------------------
// Two squares modulo prime powers

inline i64 two_squares_count(i64 A, i64 p, int k) {
  if (!is_prime(p)) throw InvalidArgument("two_squares_count: p must be prime");
  if (k < 1) throw InvalidArgument("two_squares_count: k must be positive");
  const i64 q = ipow(p, k);
  if (q > 100'000) throw ResourceLimit("two_squares_count: modulus too large for enumeration");
  std::vector<i64> squares(static_cast<std::size_t>(q), 0);
  for (i64 u = 0; u < q; ++u) ++squares[static_cast<std::size_t>(mulmod(u, u, q))];
  const i64 a = mod(A, q);
  i64 count = 0;
  for (i64 s = 0; s < q; ++s) count += squares[static_cast<std::size_t>(s)] * squares[static_cast<std::size_t>(mod(a - s, q))];
  return count;
}

inline i64 two_squares_closed_form(i64 A, i64 p, int k) {
  if (!is_prime(p)) throw InvalidArgument("two_squares_closed_form: p must be prime");
  if (k < 1) throw InvalidArgument("two_squares_closed_form: k must be positive");
  const i64 q = ipow(p, k);
  if (p == 2) {
    if (A % 2 == 0) throw DomainError("two_squares_closed_form: p = 2 requires odd A");
    if (k < 2) throw DomainError("two_squares_closed_form: p = 2 requires k >= 2");
    return mod(A, 4) == 1 ? 2 * q : 0;
  }
  const int v = vp_capped(A, p, k);
  if (p % 4 == 1) {
    const i64 base = q / p * (p - 1);
    return v >= k ? q + k * base : (1 + v) * base;
  }
  if (v >= k) return ipow(p, 2 * (k / 2));
  return v % 2 == 0 ? q / p * (p + 1) : 0;
}

// ---------------------------------------------------------------------------
// Point counts modulo p^k

/// Ntilde_k(e) = #{x mod p^k : p^e | Q1(x), p^k | Q2(x)} by enumeration.
inline i64 Ntilde(const QuadricPair& pair, i64 p, int k, int e, const ExecPolicy& policy = {}) {
  if (!is_prime(p)) throw InvalidArgument("Ntilde: p must be prime");
  if (k < 0 || e < 0 || e > k) throw InvalidArgument("Ntilde: need 0 <= e <= k");
  if (k == 0) return 1;
  const int n = pair.n();
  const i64 N = ipow(p, k);
  check_guard(std::pow(static_cast<double>(N), n), policy, "Ntilde");
  const i64 L1 = ipow(p, e);
  const auto& M1 = pair.Q1().matrix();
  const auto& M2 = pair.Q2().matrix();
  const auto parts = map_slabs<i64>(static_cast<std::size_t>(N), policy.workers, [&](std::size_t slab) {
    ResidueWalker w(n, N, {{&M1, L1}, {&M2, N}}, {}, {static_cast<i64>(slab)});
    i64 c = 0;
    do c += (w.value(0) == 0 && w.value(1) == 0);
    while (w.next());
    return c;
  });
  return std::accumulate(parts.begin(), parts.end(), i64{0});
}

namespace detail {

inline bigint bpow(i64 p, long e) { return e <= 0 ? bigint(1) : boost::multiprecision::pow(bigint(p), static_cast<unsigned>(e)); }

inline int vp_capped128(i128 a, i64 p, int cap) {
  if (a == 0) return cap;
  int v = 0;
  while (v < cap && a % p == 0) {
    a /= p;
    ++v;
  }
  return v;
}

/// Rank of M mod p and the Legendre symbol of the product of the pivots of a
/// diagonalization (p odd).
inline std::pair<int, int> rank_and_disc_mod_p(const IntegerMatrix& M, i64 p) {
  const int n = M.rows();
  std::vector<std::vector<i64>> a(static_cast<std::size_t>(n), std::vector<i64>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = mod(M(i, j), p);
  auto at = [&](int i, int j) -> i64& { return a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  int rank = 0;
  i64 prod = 1;
  for (;;) {
    int piv = -1;
    for (int i = 0; i < n && piv < 0; ++i)
      if (!done[static_cast<std::size_t>(i)] && at(i, i) != 0) piv = i;
    if (piv < 0) {
      int pi = -1, pj = -1;
      for (int i = 0; i < n && pi < 0; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && !done[static_cast<std::size_t>(i)] && !done[static_cast<std::size_t>(j)] && at(i, j) != 0) {
            pi = i;
            pj = j;
            break;
          }
      if (pi < 0) break;
      for (int l = 0; l < n; ++l) at(pi, l) = mod(at(pi, l) + at(pj, l), p);
      for (int l = 0; l < n; ++l) at(l, pi) = mod(at(l, pi) + at(l, pj), p);
      piv = pi;
    }
    const i64 c = at(piv, piv);
    prod = mulmod(prod, c, p);
    ++rank;
    const i64 inv = invmod(c, p);
    for (int j = 0; j < n; ++j) {
      if (j == piv || done[static_cast<std::size_t>(j)]) continue;
      const i64 f = mulmod(at(j, piv), inv, p);
      if (f == 0) continue;
      for (int l = 0; l < n; ++l) at(j, l) = mod(at(j, l) - mulmod(f, at(piv, l), p), p);
      for (int l = 0; l < n; ++l) at(l, j) = mod(at(l, j) - mulmod(f, at(l, piv), p), p);
    }
    done[static_cast<std::size_t>(piv)] = true;
  }
  return {rank, legendre(prod, p)};
}

/// sum over lambda in F_p^* of the complete Gauss sum of lambda x^T M x.
inline bigint scaled_gauss_total(const IntegerMatrix& M, i64 p) {
  const auto [r, chi] = rank_and_disc_mod_p(M, p);
  if (r % 2 == 1) return 0;
  const int sign = chi * ((p % 4 == 3 && (r / 2) % 2 == 1) ? -1 : 1);
  return bigint(sign) * (p - 1) * bpow(p, M.rows() - r / 2);
}

}  // namespace detail

struct ConeCountsModP {
  bigint on_Q2;    // #{x mod p : Q2(x) = 0}
  bigint on_both;  // #{x mod p : Q1(x) = Q2(x) = 0}
};

/// Exact counts mod an odd prime p from the Gauss sums of the pencil.
inline ConeCountsModP cone_counts_gauss(const QuadricPair& pair, i64 p) {
  if (!is_prime(p) || p == 2) throw InvalidArgument("cone_counts_gauss: p must be an odd prime");
  const bigint pn = detail::bpow(p, pair.n());
  bigint s2 = pn + detail::scaled_gauss_total(pair.Q2().matrix(), p);
  bigint s12 = pn;
  for (const auto& [b1, b2] : projective_line(p)) s12 += detail::scaled_gauss_total(pair.pencil(b1, b2), p);
  if (s2 % p != 0 || s12 % (p * p) != 0) throw InternalError("cone_counts_gauss: non-integral count");
  return {s2 / p, s12 / (p * p)};
}

namespace detail {

/// Counts the residues x mod p^k lying over a set of start nodes, descending
/// one p-adic level at a time. A node x at level s has p^s | Q2(x); the
/// linear term of Q2(x + p^s t) has valuation s + gamma with gamma = v_p(2 M2 x).
/// When gamma < s the remaining conditions are solvable coordinate by
/// coordinate and the node's descendants are counted in closed form.
class LiftTree {
 public:
  LiftTree(const QuadricPair& pair, i64 p, int k, const ExecPolicy& policy)
      : pair_(pair), p_(p), k_(k), n_(pair.n()), guard_(policy.guard), workers_(policy.workers) {
    if (!is_prime(p)) throw InvalidArgument("LiftTree: p must be prime");
    two_adic_ = p == 2;
    if (k < (two_adic_ ? 2 : 1)) throw InvalidArgument("LiftTree: level too small");
    if (std::pow(static_cast<double>(p), k) > 1e12) throw ArithmeticOverflow("LiftTree: modulus too large");
  }

  /// h[v] = number of x mod p^k at the end of the tree with min(v_p(Q1(x)), k) = v.
  /// For p = 2 only h[0] is used and counts x with Q1(x) = 1 mod 4.
  std::vector<bigint> histogram() const {
    const int s0 = two_adic_ ? 2 : 1;
    const i64 N = ipow(p_, s0);
    check_guard(std::pow(static_cast<double>(N), n_), ExecPolicy{1, guard_}, "LiftTree");
    const auto& M1 = pair_.Q1().matrix();
    const auto& M2 = pair_.Q2().matrix();
    const auto parts = map_slabs<std::vector<bigint>>(static_cast<std::size_t>(N), workers_, [&](std::size_t slab) {
      std::vector<bigint> h(static_cast<std::size_t>(k_ + 1), 0);
      double work = 0.0;
      ResidueWalker w(n_, N, {{&M1, N}, {&M2, N}}, {}, {static_cast<i64>(slab)});
      do {
        if (w.value(1) != 0) continue;
        if (two_adic_) {
          if (mod(w.value(0), 4) != 1) continue;
        } else if (std::all_of(w.k().begin(), w.k().end(), [](i64 v) { return v == 0; })) {
          continue;
        }
        std::vector<i64> x = w.k();
        visit(x, s0, h, work);
      } while (w.next());
      return h;
    });
    std::vector<bigint> total(static_cast<std::size_t>(k_ + 1), 0);
    for (const auto& h : parts)
      for (std::size_t v = 0; v < h.size(); ++v) total[v] += h[v];
    return total;
  }

 private:
  void visit(std::vector<i64>& x, int s, std::vector<bigint>& h, double& work) const {
    const i128 q1 = pair_.Q1().eval128(x);
    const i128 q2 = pair_.Q2().eval128(x);
    const int v1 = two_adic_ ? 0 : vp_capped128(q1, p_, s);
    if (s == k_) {
      h[static_cast<std::size_t>(std::min(v1, k_))] += 1;
      return;
    }
    const auto& M2 = pair_.Q2().matrix();
    const auto& M1 = pair_.Q1().matrix();
    int gamma = 64;
    std::vector<i64> g2(static_cast<std::size_t>(n_)), g1(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      i128 a = 0, b = 0;
      for (int j = 0; j < n_; ++j) {
        a += static_cast<i128>(M2(i, j)) * x[static_cast<std::size_t>(j)];
        b += static_cast<i128>(M1(i, j)) * x[static_cast<std::size_t>(j)];
      }
      gamma = std::min(gamma, vp_capped128(2 * a, p_, 64));
      g2[static_cast<std::size_t>(i)] = static_cast<i64>(((a % p_) + p_) % p_);
      g1[static_cast<std::size_t>(i)] = static_cast<i64>(((b % p_) + p_) % p_);
    }
    if (v1 < s && gamma < s) {
      bigint count;
      if (k_ <= s + gamma) {
        count = vp_capped128(q2, p_, k_) >= k_ ? bpow(p_, static_cast<long>(k_ - s) * n_) : bigint(0);
      } else {
        count = vp_capped128(q2, p_, s + gamma) >= s + gamma
                    ? bpow(p_, static_cast<long>(k_ - s - gamma) * (n_ - 1) + static_cast<long>(gamma) * n_)
                    : bigint(0);
      }
      h[static_cast<std::size_t>(v1)] += count;
      return;
    }
    if (!two_adic_ && gamma == 0 && independent(g1, g2)) {
      // p^s | Q1, Q2 with independent gradients: the share of descendants
      // with p^{s+t} | Q1 is p^{-t}.
      const long E = static_cast<long>(k_ - s) * (n_ - 1);
      for (int t = 0; t < k_ - s; ++t) h[static_cast<std::size_t>(s + t)] += bigint(p_ - 1) * bpow(p_, E - t - 1);
      h[static_cast<std::size_t>(k_)] += bpow(p_, E - (k_ - s));
      return;
    }
    work += std::pow(static_cast<double>(p_), n_);
    if (!(work <= guard_)) throw ResourceLimit("LiftTree: work exceeds guard at p = " + std::to_string(p_));
    const i64 step = ipow(p_, s);
    const std::vector<i64> base = x;
    std::vector<i64> t(static_cast<std::size_t>(n_), 0);
    for (;;) {
      for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(i)] = base[static_cast<std::size_t>(i)] + step * t[static_cast<std::size_t>(i)];
      if (vp_capped128(pair_.Q2().eval128(x), p_, s + 1) >= s + 1) visit(x, s + 1, h, work);
      int i = n_ - 1;
      while (i >= 0 && ++t[static_cast<std::size_t>(i)] == p_) t[static_cast<std::size_t>(i--)] = 0;
      if (i < 0) break;
    }
    x = base;
  }

  bool independent(const std::vector<i64>& a, const std::vector<i64>& b) const {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (mod(a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)] - a[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(i)], p_) != 0)
          return true;
    return false;
  }

  const QuadricPair& pair_;
  i64 p_;
  int k_;
  int n_;
  double guard_;
  unsigned workers_;
  bool two_adic_ = false;
};

}  // namespace detail

/// Primitive x mod p^k (p odd) with p^k | Q2(x), binned by min(v_p(Q1(x)), k).
inline std::vector<bigint> primitive_histogram(const QuadricPair& pair, i64 p, int k, const ExecPolicy& policy = {}) {
  if (p == 2) throw InvalidArgument("primitive_histogram: p must be odd");
  return detail::LiftTree(pair, p, k, policy).histogram();
}

/// Ntilde_k(e) assembled from primitive histograms at levels k, k-2, ...
inline bigint Ntilde_lifted(const QuadricPair& pair, i64 p, int k, int e, const ExecPolicy& policy = {}) {
  if (k < 0 || e < 0 || e > k) throw InvalidArgument("Ntilde_lifted: need 0 <= e <= k");
  if (k == 0) return 1;
  const int n = pair.n();
  bigint total = detail::bpow(p, static_cast<long>(n) * (k - (k + 1) / 2));
  for (int j = 0; 2 * j < k; ++j) {
    const auto h = primitive_histogram(pair, p, k - 2 * j, policy);
    bigint part = 0;
    for (int v = std::max(e - 2 * j, 0); v <= k - 2 * j; ++v) part += h[static_cast<std::size_t>(v)];
    total += detail::bpow(p, static_cast<long>(n) * j) * part;
  }
  return total;
}

/// rho(p^r) = Ntilde_r(r) for odd p through the lifting tree.
inline bigint rho_lifted(const QuadricPair& pair, const PrimePower& q, const ExecPolicy& policy = {}) {
  return Ntilde_lifted(pair, q.p, q.r, q.r, policy);
}

// ---------------------------------------------------------------------------
// p-adic densities

namespace detail {

inline rational chi_over_p(i64 p) { return rational(chi4(p), p); }

/// The limit value of the density predicted by a single level-k histogram:
/// the valuation distribution of k is carried to every level, the capped bin
/// continues geometrically and the points divisible by p^j contribute with
/// weight p^{-j(n-2)}.
inline rational stabilized_sigma(i64 p, int n, int k, const std::vector<bigint>& h) {
  if (n < 3) throw DomainError("stabilized_sigma: needs n >= 3");
  const int chi = chi4(p);
  const rational norm = rational(bpow(p, static_cast<long>(k) * (n - 1)));
  auto W = [chi](int m) { return chi == 1 ? rational(m + 1) : rational(m % 2 == 0 ? 1 : 0); };
  const rational cp = chi_over_p(p);
  const rational tail = (k % 2 == 1 && chi == -1 ? rational(-1) : rational(1)) * cp / (1 - cp);
  rational F0 = 0, mass = 0;
  for (int v = 0; v <= k; ++v) {
    const rational pi = rational(h[static_cast<std::size_t>(v)]) / norm;
    mass += pi;
    F0 += pi * (v < k ? W(v) : W(k) + tail);
  }
  const rational x = rational(1) / rational(bpow(p, n - 2));
  rational tau = F0 / (1 - x);
  if (chi == 1) tau += 2 * mass * x / ((1 - x) * (1 - x));
  return (1 - cp) * tau;
}

}  // namespace detail

/// (1 - chi(p)/p) p^{-k(n-1)} sum_{0<=e<=k} chi(p^e) Ntilde_k(e), summed as written.
inline rational sigma_p_literal(const QuadricPair& pair, i64 p, int k, const ExecPolicy& policy = {}) {
  if (p == 2 || !is_prime(p)) throw InvalidArgument("sigma_p_literal: p must be an odd prime");
  if (k < 1) throw InvalidArgument("sigma_p_literal: k must be positive");
  const int n = pair.n();
  std::vector<std::vector<bigint>> hs;
  for (int j = 0; 2 * j < k; ++j) hs.push_back(primitive_histogram(pair, p, k - 2 * j, policy));
  const bigint top = detail::bpow(p, static_cast<long>(n) * (k - (k + 1) / 2));
  bigint sum = 0;
  int chi_e = 1;
  for (int e = 0; e <= k; ++e) {
    bigint Ne = top;
    for (int j = 0; 2 * j < k; ++j) {
      bigint part = 0;
      for (int v = std::max(e - 2 * j, 0); v <= k - 2 * j; ++v) part += hs[static_cast<std::size_t>(j)][static_cast<std::size_t>(v)];
      Ne += detail::bpow(p, static_cast<long>(n) * j) * part;
    }
    sum += chi_e * Ne;
    chi_e *= chi4(p);
  }
  return (1 - detail::chi_over_p(p)) * rational(sum) / rational(detail::bpow(p, static_cast<long>(k) * (n - 1)));
}

inline rational sigma_p_stabilized(const QuadricPair& pair, i64 p, int k, const ExecPolicy& policy = {}) {
  if (p == 2 || !is_prime(p)) throw InvalidArgument("sigma_p_stabilized: p must be an odd prime");
  if (k == 1) {
    const auto c = cone_counts_gauss(pair, p);
    return detail::stabilized_sigma(p, pair.n(), 1, {c.on_Q2 - c.on_both, c.on_both - 1});
  }
  return detail::stabilized_sigma(p, pair.n(), k, primitive_histogram(pair, p, k, policy));
}

struct LocalDensity {
  i64 p = 0;
  int k_used = 0;
  rational value;
  rational previous;
  bool converged = false;
  bool good = false;
  bool literal = false;
  double as_double() const { return static_cast<double>(value); }
};

struct DensityOptions {
  /// Largest p^n for which good primes are also lifted to k = 2.
  double lift_cap = 1e7;
};

inline bool rationals_agree(const rational& a, const rational& b) {
  if (a == b) return true;
  const double da = static_cast<double>(a), db = static_cast<double>(b);
  return std::abs(da - db) <= 1e-12 * std::max(std::abs(da), std::abs(db));
}

/// sigma_p by the stabilized estimator. Good primes stop at k = 2 (or at
/// k = 1 when lifting is too expensive), bad primes go to k_max. Binary
/// pairs have no stabilized form and get the literal truncation at k_max.
inline LocalDensity sigma_p(const QuadricPair& pair, i64 p, int k_max, const ExecPolicy& policy = {}, const DensityOptions& opt = {}) {
  if (p == 2 || !is_prime(p)) throw InvalidArgument("sigma_p: p must be an odd prime");
  if (k_max < 1) throw InvalidArgument("sigma_p: k_max must be positive");
  LocalDensity out;
  out.p = p;
  out.good = certified_good(pair, p);
  if (pair.n() < 3) {
    out.literal = true;
    out.k_used = k_max;
    out.value = sigma_p_literal(pair, p, k_max, policy);
    out.previous = k_max > 1 ? sigma_p_literal(pair, p, k_max - 1, policy) : out.value;
    out.converged = k_max > 1 && rationals_agree(out.value, out.previous);
    return out;
  }
  out.value = sigma_p_stabilized(pair, p, 1, policy);
  out.previous = out.value;
  out.k_used = 1;
  const double pn = std::pow(static_cast<double>(p), pair.n());
  const int target = out.good ? (pn <= opt.lift_cap ? std::min(k_max, 2) : 1) : k_max;
  for (int k = 2; k <= target; ++k) {
    out.previous = out.value;
    out.value = sigma_p_stabilized(pair, p, k, policy);
    out.k_used = k;
  }
  out.converged = out.k_used >= 2 ? rationals_agree(out.value, out.previous) : out.good;
  return out;
}

/// #{x mod 2^k : Q1(x) = 1 mod 4, 2^k | Q2(x)}, k >= 2.
inline bigint two_adic_count(const QuadricPair& pair, int k, const ExecPolicy& policy = {}) {
  return detail::LiftTree(pair, 2, k, policy).histogram()[0];
}

inline rational sigma_2_at(const QuadricPair& pair, int k, const ExecPolicy& policy = {}) {
  const long e = static_cast<long>(k) * (pair.n() - 1) - 1;
  return rational(two_adic_count(pair, k, policy)) / rational(detail::bpow(2, e));
}

inline LocalDensity sigma_2(const QuadricPair& pair, int k_max, const ExecPolicy& policy = {}) {
  if (k_max < 3) throw InvalidArgument("sigma_2: k_max must be at least 3");
  LocalDensity out;
  out.p = 2;
  out.k_used = k_max;
  out.previous = sigma_2_at(pair, k_max - 1, policy);
  out.value = sigma_2_at(pair, k_max, policy);
  out.converged = rationals_agree(out.value, out.previous);
  return out;
}

// ---------------------------------------------------------------------------
// Real density

struct TauOptions {
  int grid_start = 8;
  double max_cells = 3e6;
  double tolerance = 0.01;
  std::vector<double> ladder{0.2, 0.1, 0.05, 0.025};
};

struct TauEstimate {
  double slab = 0.0;
  double coarea = 0.0;
  double spread = 0.0;
  double halving_change = 0.0;
  double scale = 0.0;
  int axis = 0;
  int grid_slab = 0;
  int grid_coarea = 0;
  bool refined = false;
  std::vector<std::pair<double, double>> ladder;
};

namespace detail {

/// Integrates over the n-1 coordinates other than `axis` on a midpoint grid
/// over the projected ball; `fibre` returns the integral along the axis.
template <class Fibre>
double grid_integral(const WeightFunction& W, int axis, int g, unsigned workers, Fibre&& fibre) {
  const int n = W.n();
  const double hstep = 2.0 * W.rho / g;
  double cell = 1.0;
  for (int i = 0; i < n - 1; ++i) cell *= hstep;
  std::vector<int> others;
  for (int i = 0; i < n; ++i)
    if (i != axis) others.push_back(i);
  const auto parts = map_slabs<double>(static_cast<std::size_t>(g), workers, [&](std::size_t slab) {
    std::vector<int> idx(others.size(), 0);
    if (!idx.empty()) idx[0] = static_cast<int>(slab);
    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    double acc = 0.0;
    for (;;) {
      double r2 = 0.0;
      for (std::size_t a = 0; a < others.size(); ++a) {
        const auto i = static_cast<std::size_t>(others[a]);
        y[i] = W.x0[i] - W.rho + (idx[a] + 0.5) * hstep;
        r2 += (y[i] - W.x0[i]) * (y[i] - W.x0[i]);
      }
      if (r2 < W.rho * W.rho) acc += fibre(y, r2);
      std::size_t a = others.size();
      bool more = false;
      while (a > 1) {
        --a;
        if (++idx[a] < g) {
          more = true;
          break;
        }
        idx[a] = 0;
      }
      if (!more) break;
    }
    return acc;
  });
  double total = 0.0;
  for (double v : parts) total += v;
  return total * cell;
}

struct AxisQuadratic {
  double A, B, C;  // Q2 = A t^2 + B t + C along the axis
  double eval(double t) const { return (A * t + B) * t + C; }
};

inline AxisQuadratic axis_quadratic(const IntegerMatrix& M, const std::vector<double>& y, int j) {
  const int n = M.rows();
  AxisQuadratic q{static_cast<double>(M(j, j)), 0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    if (i == j) continue;
    q.B += 2.0 * static_cast<double>(M(j, i)) * y[static_cast<std::size_t>(i)];
    for (int l = 0; l < n; ++l)
      if (l != j) q.C += static_cast<double>(M(i, l)) * y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(l)];
  }
  return q;
}

inline void real_roots(double A, double B, double C, std::vector<double>& out) {
  if (A == 0.0) {
    if (B != 0.0) out.push_back(-C / B);
    return;
  }
  const double disc = B * B - 4 * A * C;
  if (disc < 0) return;
  const double s = std::sqrt(disc);
  const double qq = -0.5 * (B + (B >= 0 ? s : -s));
  if (qq != 0.0) {
    out.push_back(qq / A);
    out.push_back(C / qq);
  } else {
    out.push_back(0.0);
  }
}

inline double bump(double r2, double rho) {
  const double t = r2 / (rho * rho);
  return t < 1.0 ? std::exp(-1.0 / (1.0 - t)) : 0.0;
}

inline double coarea_estimate(const QuadraticForm& Q2, const WeightFunction& W, int axis, int g, unsigned workers) {
  const auto& M = Q2.matrix();
  const double cj = W.x0[static_cast<std::size_t>(axis)];
  return grid_integral(W, axis, g, workers, [&](const std::vector<double>& y, double r2) {
    const auto q = axis_quadratic(M, y, axis);
    std::vector<double> roots;
    real_roots(q.A, q.B, q.C, roots);
    double acc = 0.0;
    for (double t : roots) {
      const double rr = r2 + (t - cj) * (t - cj);
      const double w = bump(rr, W.rho);
      if (w == 0.0) continue;
      acc += w / std::abs(2 * q.A * t + q.B);
    }
    return acc;
  });
}

/// (2 eps)^{-1} times the weighted volume of |Q2| <= eps.
inline double slab_estimate(const QuadraticForm& Q2, const WeightFunction& W, int axis, int g, double eps, unsigned workers) {
  const auto& M = Q2.matrix();
  const double cj = W.x0[static_cast<std::size_t>(axis)];
  using GL = boost::math::quadrature::gauss<double, 10>;
  const double vol = grid_integral(W, axis, g, workers, [&](const std::vector<double>& y, double r2) {
    const auto q = axis_quadratic(M, y, axis);
    const double half = std::sqrt(W.rho * W.rho - r2);
    const double lo = cj - half, hi = cj + half;
    std::vector<double> cuts{lo, hi};
    std::vector<double> roots;
    real_roots(q.A, q.B, q.C - eps, roots);
    real_roots(q.A, q.B, q.C + eps, roots);
    for (double t : roots)
      if (t > lo && t < hi) cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double a = cuts[i], b = cuts[i + 1];
      if (b <= a || std::abs(q.eval(0.5 * (a + b))) > eps) continue;
      acc += GL::integrate([&](double t) { return bump(r2 + (t - cj) * (t - cj), W.rho); }, a, b);
    }
    return acc;
  });
  return vol / (2.0 * eps);
}

}  // namespace detail

/// Both estimators of tau_infinity(Q2, W). The slab ladder is extrapolated
/// in eps^2 from its two finest rungs.
inline TauEstimate tau_infinity(const QuadraticForm& Q2, const WeightFunction& W, const TauOptions& opt = {}, const ExecPolicy& policy = {}) {
  W.validate();
  const int n = Q2.n();
  if (n < 2) throw InvalidArgument("tau_infinity: need at least two variables");
  if (W.n() != n) throw InvalidArgument("tau_infinity: weight and form have different dimensions");
  if (opt.ladder.size() < 2) throw InvalidArgument("tau_infinity: ladder needs two rungs");
  if (detail::norm2(W.x0) <= W.rho) throw DomainError("tau_infinity: the support of W contains the singular point 0 of Q2 = 0");
  TauEstimate out;
  const auto grad = Q2.gradient_real(W.x0);
  out.axis = static_cast<int>(std::max_element(grad.begin(), grad.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) - grad.begin());
  out.scale = W.rho * detail::norm2(grad);
  if (!(out.scale > 0.0)) throw DomainError("tau_infinity: grad Q2 vanishes at the centre of W");

  auto cells = [n](int g) { return std::pow(static_cast<double>(g), n - 1); };
  auto slab_at = [&](int g, std::vector<std::pair<double, double>>& ladder) {
    ladder.clear();
    for (double f : opt.ladder) ladder.emplace_back(f * out.scale, detail::slab_estimate(Q2, W, out.axis, g, f * out.scale, policy.workers));
    const double t1 = ladder[ladder.size() - 2].second, t2 = ladder.back().second;
    return (4.0 * t2 - t1) / 3.0;
  };

  int g = opt.grid_start;
  check_guard(cells(g) * static_cast<double>(opt.ladder.size()) * 20, policy, "tau_infinity");
  std::vector<std::pair<double, double>> ladder;
  double prev = slab_at(g, ladder);
  bool slab_done = false;
  while (cells(2 * g) <= opt.max_cells) {
    g *= 2;
    std::vector<std::pair<double, double>> next;
    const double cur = slab_at(g, next);
    ladder = next;
    const bool small = std::abs(cur - prev) <= opt.tolerance * std::abs(cur);
    prev = cur;
    if (small) {
      slab_done = true;
      break;
    }
  }
  out.slab = prev;
  out.ladder = ladder;
  out.grid_slab = g;

  g = opt.grid_start;
  double cprev = detail::coarea_estimate(Q2, W, out.axis, g, policy.workers);
  bool coarea_done = false;
  while (cells(2 * g) <= opt.max_cells) {
    g *= 2;
    const double cur = detail::coarea_estimate(Q2, W, out.axis, g, policy.workers);
    const bool small = std::abs(cur - cprev) <= opt.tolerance * std::abs(cur);
    cprev = cur;
    if (small) {
      coarea_done = true;
      break;
    }
  }
  out.coarea = cprev;
  out.grid_coarea = g;
  out.refined = slab_done && coarea_done;

  const double big = std::max(std::abs(out.slab), std::abs(out.coarea));
  out.spread = big > 0.0 ? std::abs(out.slab - out.coarea) / big : 0.0;
  const double t1 = ladder[ladder.size() - 2].second, t2 = ladder.back().second;
  out.halving_change = t2 != 0.0 ? std::abs(t2 - t1) / std::abs(t2) : 0.0;
  return out;
}

inline double sigma_infinity(const TauEstimate& tau) { return std::numbers::pi * tau.slab; }

inline double sigma_infinity(const QuadraticForm& Q2, const WeightFunction& W, const TauOptions& opt = {}, const ExecPolicy& policy = {}) {
  return sigma_infinity(tau_infinity(Q2, W, opt, policy));
}

// ---------------------------------------------------------------------------
// Singular product and the experiment

struct DensityReport {
  std::string pair;
  int n = 0;
  i64 p_max = 0;
  int k_max = 0;
  std::vector<LocalDensity> primes;
  LocalDensity sigma2;
  TauEstimate tau;
  double sigma_inf = 0.0;
  double c_truncated = 0.0;
  double tail_constant = 0.0;
  double tail_bound = 0.0;
};

namespace detail {

/// sum_{p > x} p^{-3/2}: explicit up to 10^6 and 2/(sqrt(X) log X) beyond.
inline double prime_tail_sum(i64 x) {
  const i64 X = 1'000'000;
  double s = 0.0;
  for (i64 p : primes_up_to(X))
    if (p > x) s += std::pow(static_cast<double>(p), -1.5);
  return s + 2.0 / (std::sqrt(static_cast<double>(X)) * std::log(static_cast<double>(X)));
}

}  // namespace detail

inline DensityReport singular_constant(const QuadricPair& pair, const WeightFunction& W, i64 p_max, int k_max,
                                       const ExecPolicy& policy = {}, const DensityOptions& dopt = {}, const TauOptions& topt = {}) {
  if (p_max < 2) throw InvalidArgument("singular_constant: p_max must be at least 2");
  if (k_max < 3) throw InvalidArgument("singular_constant: k_max must be at least 3");
  DensityReport r;
  r.pair = pair.name();
  r.n = pair.n();
  r.p_max = p_max;
  r.k_max = k_max;
  std::vector<i64> odd;
  for (i64 p : primes_up_to(p_max))
    if (p > 2) odd.push_back(p);
  const ExecPolicy inner{1, policy.guard};
  r.primes = map_slabs<LocalDensity>(odd.size(), policy.workers, [&](std::size_t i) { return sigma_p(pair, odd[i], k_max, inner, dopt); });
  r.sigma2 = sigma_2(pair, k_max, policy);
  r.tau = tau_infinity(pair.Q2(), W, topt, policy);
  r.sigma_inf = sigma_infinity(r.tau);
  double prod = static_cast<double>(r.sigma2.value) * r.sigma_inf;
  for (const auto& d : r.primes) {
    prod *= d.as_double();
    if (d.good) r.tail_constant = std::max(r.tail_constant, std::abs(d.as_double() - 1.0) * std::pow(static_cast<double>(d.p), 1.5));
  }
  r.c_truncated = prod;
  r.tail_bound = r.tail_constant * detail::prime_tail_sum(p_max);
  return r;
}

namespace detail {

inline std::string rational_string(const rational& q) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(q) << '/' << boost::multiprecision::denominator(q);
  return os.str();
}

inline nlohmann::ordered_json density_json(const LocalDensity& d) {
  nlohmann::ordered_json j;
  j["p"] = d.p;
  j["k_used"] = d.k_used;
  j["sigma"] = d.as_double();
  j["previous"] = static_cast<double>(d.previous);
  j["converged"] = d.converged;
  if (d.p != 2) j["good"] = d.good;
  if (d.literal) j["literal"] = true;
  j["exact"] = rational_string(d.value);
  return j;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const DensityReport& r) {
  nlohmann::ordered_json j;
  j["pair"] = r.pair;
  j["n"] = r.n;
  j["p_max"] = r.p_max;
  j["k_max"] = r.k_max;
  j["sigma2"] = detail::density_json(r.sigma2);
  auto& primes = j["primes"] = nlohmann::ordered_json::array();
  for (const auto& d : r.primes) primes.push_back(detail::density_json(d));
  auto& inf = j["sigma_inf"];
  inf["value"] = r.sigma_inf;
  inf["tau_slab"] = r.tau.slab;
  inf["tau_coarea"] = r.tau.coarea;
  inf["spread"] = r.tau.spread;
  inf["halving_change"] = r.tau.halving_change;
  inf["axis"] = r.tau.axis;
  inf["grid"] = {r.tau.grid_slab, r.tau.grid_coarea};
  inf["refined"] = r.tau.refined;
  j["c_truncated"] = r.c_truncated;
  j["tail"] = {{"constant", r.tail_constant}, {"bound", r.tail_bound}};
  return j;
}

/// Pretty-prints JSON with every floating-point value at 12 significant digits.
inline void write_json(std::ostream& os, const nlohmann::ordered_json& j, int indent = 2, int depth = 0) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) os << ",\n";
      first = false;
      os << pad << nlohmann::json(key).dump() << ": ";
      write_json(os, value, indent, depth + 1);
    }
    os << '\n' << close << '}';
  } else if (j.is_array()) {
    if (j.empty()) {
      os << "[]";
      return;
    }
    os << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) os << ",\n";
      os << pad;
      write_json(os, j[i], indent, depth + 1);
    }
    os << '\n' << close << ']';
  } else if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw DomainError("write_json: non-finite value");
    os << format_number(v);
  } else {
    os << j.dump();
  }
}

struct ExperimentRow {
  double B = 0.0;
  double S = 0.0;
  double normalized = 0.0;
  double c = 0.0;
  double ratio = 0.0;
};

inline std::vector<ExperimentRow> experiment(const QuadricPair& pair, const WeightFunction& W, const std::vector<double>& B_list,
                                             double c_truncated, const ExecPolicy& policy = {}) {
  if (B_list.empty()) throw InvalidArgument("experiment: empty B list");
  std::vector<ExperimentRow> rows;
  for (double B : B_list) {
    const auto s = S_of_B(pair, W, B, policy);
    const double norm = s.normalized(pair.n());
    rows.push_back({B, s.S, norm, c_truncated, c_truncated != 0.0 ? norm / c_truncated : 0.0});
  }
  return rows;
}

inline const char* experiment_header() { return "B,S_B,S_over_Bn2,c_trunc,ratio"; }

inline void write_experiment_csv(std::ostream& os, const std::vector<ExperimentRow>& rows) {
  os << experiment_header() << '\n';
  for (const auto& r : rows)
    os << format_number(r.B) << ',' << format_number(r.S) << ',' << format_number(r.normalized) << ',' << format_number(r.c) << ','
       << format_number(r.ratio) << '\n';
}

inline std::vector<ExperimentRow> read_experiment_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || detail::trim(line) != experiment_header())
    throw ParseError("experiment csv: missing header '" + std::string(experiment_header()) + "'");
  std::vector<ExperimentRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(cell, &used));
        if (detail::trim(cell.substr(used)) != "") throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError("experiment csv line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (v.size() != 5) throw ParseError("experiment csv line " + std::to_string(lineno) + ": expected 5 columns");
    rows.push_back({v[0], v[1], v[2], v[3], v[4]});
  }
  return rows;
}

}  // namespace qc
