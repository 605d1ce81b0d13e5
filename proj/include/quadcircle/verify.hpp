#pragma once

// Randomized and exhaustive lemma checks grouped into named suites. Every
// random choice is drawn from a SplitMix64 stream split off the suite seed by
// check name, so a suite's report depends only on (suite, seed, workers).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "quadcircle/counting.hpp"
#include "quadcircle/densities.hpp"
#include "quadcircle/expsums.hpp"
#include "quadcircle/lincong.hpp"
#include "quadcircle/modarith.hpp"
#include "quadcircle/quadforms.hpp"

namespace qc {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [lo, hi].
  i64 range(i64 lo, i64 hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<i64>(next() % span);
  }

  template <class T>
  const T& pick(const std::vector<T>& v) { return v[static_cast<std::size_t>(next() % v.size())]; }

  /// An independent stream keyed by `tag`.
  SplitMix64 split(const std::string& tag) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : tag) h = (h ^ c) * 0x100000001b3ULL;
    SplitMix64 child(state_ ^ h);
    child.next();
    return child;
  }

 private:
  std::uint64_t state_;
};

struct CheckResult {
  CheckResult() = default;
  explicit CheckResult(std::string t) : tag(std::move(t)) {}

  std::string tag;
  bool pass = true;
  long samples = 0;
  double worst = 0.0;  // worst normalized discrepancy or fitted-constant spread
  std::string note;

  void fail(const std::string& why) {
    if (pass) note = why;
    pass = false;
  }
};

struct VerifyReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }
};

inline void write_report(std::ostream& os, const VerifyReport& r) {
  os << "suite " << r.suite << " seed " << r.seed << '\n';
  for (const auto& c : r.checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.tag << " samples=" << c.samples << " worst=" << format_number(c.worst);
    if (!c.note.empty()) os << " note=" << c.note;
    os << '\n';
  }
  os << "verdict " << (r.passed() ? "PASS" : "FAIL") << '\n';
}

namespace detail {

inline std::vector<i64> random_vector(SplitMix64& rng, int n, i64 bound) {
  std::vector<i64> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = rng.range(-bound, bound);
  return v;
}

inline IntegerMatrix random_symmetric(SplitMix64& rng, int n, i64 bound) {
  IntegerMatrix M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) M(i, j) = M(j, i) = rng.range(-bound, bound);
  return M;
}

inline QuadricPair random_pair(SplitMix64& rng, int n) {
  for (;;) {
    auto M2 = random_symmetric(rng, n, 3);
    if (determinant(M2) == 0) continue;
    return QuadricPair(QuadraticForm(random_symmetric(rng, n, 3)), QuadraticForm(M2));
  }
}

inline std::string describe(const std::vector<i64>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// gauss

/// One-variable Gauss sums against direct summation, for every unit alpha and
/// every m mod p^r with p^r <= max_q. worst = max |error| / p^{r/2}.
inline CheckResult check_gauss_1d(const std::vector<i64>& primes, i64 max_q, double tol = 1e-6) {
  CheckResult out{"gauss-1d"};
  for (i64 p : primes)
    for (int r = 1; ipow(p, r) <= max_q; ++r) {
      const auto q = PrimePower::make(p, r);
      const RootTable e(q.value);
      const double scale = std::pow(static_cast<double>(p), r / 2.0);
      for (i64 alpha = 1; alpha < q.value; ++alpha) {
        if (alpha % p == 0) continue;
        for (i64 m = 0; m < q.value; ++m) {
          cplx direct = 0.0;
          for (i64 k = 0; k < q.value; ++k) direct += e[mod(mulmod(alpha, mulmod(k, k, q.value), q.value) + mulmod(m, k, q.value), q.value)];
          const double err = std::abs(direct - quad_gauss_1d(q, alpha, m).value()) / scale;
          out.worst = std::max(out.worst, err);
          ++out.samples;
          if (err > tol) out.fail("p^r=" + std::to_string(q.value) + " alpha=" + std::to_string(alpha) + " m=" + std::to_string(m));
        }
      }
    }
  return out;
}

/// Closed form of Q_q(m) against S_{1,q}(m) summed over residues, for diagonal
/// Q2 with random unit coefficients. The n = 7 instances use the factorized
/// path; n = 5 the Ramanujan-reduced one. worst is the error relative to
/// max(|value|, q^{n/2}).
inline CheckResult check_expQ(SplitMix64 rng, const std::vector<int>& dims, const std::vector<i64>& moduli, int samples,
                              const ExecPolicy& policy = {}, double tol = 1e-6) {
  CheckResult out{"expQ-closed-form"};
  const std::vector<i64> coeffs{1, 2, 4, 8, 11, 13, -1, -2, -4, -8, -11, -13};
  for (int n : dims)
    for (i64 q : moduli) {
      std::vector<i64> a(static_cast<std::size_t>(n));
      for (auto& c : a) c = rng.pick(coeffs);
      const QuadricPair pair(QuadraticForm::sum_of_squares(n), QuadraticForm::diagonal(a));
      const SumRoute route = n >= 7 ? SumRoute::Diagonal : n >= 5 ? SumRoute::Ramanujan : SumRoute::Direct;
      for (int s = 0; s < samples; ++s) {
        const auto m = detail::random_vector(rng, n, 3 * q);
        const cplx brute = Q_q(pair, q, m, policy, route).value();
        const cplx closed = Q_q_explicit(pair.Q2(), q, m).value();
        const double err = std::abs(brute - closed) / std::max(std::abs(brute), std::pow(static_cast<double>(q), n / 2.0));
        out.worst = std::max(out.worst, err);
        ++out.samples;
        if (err > tol) out.fail("n=" + std::to_string(n) + " q=" + std::to_string(q) + " m=" + detail::describe(m));
      }
    }
  return out;
}

/// |sum_{k mod p^r} e(Q(k) + m.k)| <= p^{nr/2} sqrt(#{x : 2Mx = 0 mod p^r}) on
/// random forms. worst = max lhs / rhs.
inline CheckResult check_gauss_sum_bound(SplitMix64 rng, int instances, const ExecPolicy& policy = {}) {
  CheckResult out{"gauss-sum-bound"};
  for (int it = 0; it < instances; ++it) {
    const int n = static_cast<int>(rng.range(1, 3));
    const auto M = detail::random_symmetric(rng, n, 4);
    const i64 p = rng.pick(std::vector<i64>{2, 3, 5, 7});
    const int r = static_cast<int>(rng.range(1, p <= 3 ? 3 : 2));
    const i64 q = ipow(p, r);
    const auto m = detail::random_vector(rng, n, 2 * q);
    const double lhs = complete_quadratic_sum(QuadraticForm(M), m, q, policy).abs();
    const double K = static_cast<double>(count_lincong(M.scaled(2), std::vector<i64>(static_cast<std::size_t>(n), 0), q));
    const double rhs = std::pow(static_cast<double>(q), n / 2.0) * std::sqrt(K);
    out.worst = std::max(out.worst, lhs / rhs);
    ++out.samples;
    if (lhs > rhs * (1 + 1e-9) + 1e-9) out.fail("q=" + std::to_string(q) + " n=" + std::to_string(n));
  }
  return out;
}

// ---------------------------------------------------------------------------
// multiplicativity

/// S_{d1 d2, q1 q2}(m) = S_{d1,q1}(m) S_{d2,q2}(m) for coprime d1 q1, d2 q2, each
/// at most `max_dq`, on random pairs with n <= 3. worst = max error / tolerance.
inline CheckResult check_multiplicativity(SplitMix64 rng, int configs, i64 max_dq = 12, const ExecPolicy& policy = {}) {
  CheckResult out{"mult-coprime"};
  std::vector<std::pair<i64, i64>> small;
  for (i64 d = 1; d <= max_dq; ++d)
    for (i64 q = 1; d * q <= max_dq; ++q) small.emplace_back(d, q);
  while (out.samples < configs) {
    const auto [d1, q1] = rng.pick(small);
    const auto [d2, q2] = rng.pick(small);
    if (std::gcd(d1 * q1, d2 * q2) != 1 || d1 * q1 * d2 * q2 == 1) continue;
    const int n = static_cast<int>(rng.range(1, 3));
    const auto pair = detail::random_pair(rng, n);
    const auto m = detail::random_vector(rng, n, 20);
    const auto whole = S_dq(pair, d1 * d2, q1 * q2, m, policy, SumRoute::Ramanujan);
    const auto parts = S_dq(pair, d1, q1, m, policy, SumRoute::Direct) * S_dq(pair, d2, q2, m, policy, SumRoute::Direct);
    const double ratio = std::abs(whole.value() - parts.value()) / (whole.tol + parts.tol);
    out.worst = std::max(out.worst, ratio);
    ++out.samples;
    if (!whole.agrees(parts))
      out.fail("(" + std::to_string(d1) + "," + std::to_string(q1) + ")x(" + std::to_string(d2) + "," + std::to_string(q2) + ")");
  }
  return out;
}

/// T_{d,q}(m) against S_{d,q'}(m) S^{chi(dq')}_{1,2^l}(m).
inline CheckResult check_T_factorization(SplitMix64 rng, int configs, const std::vector<QuadricPair>& pairs,
                                         const ExecPolicy& policy = {}) {
  CheckResult out{"T-factorization"};
  const std::vector<std::pair<i64, i64>> dq{{1, 2}, {1, 4}, {3, 2}, {1, 3}, {3, 1}, {5, 2}, {3, 4}, {1, 6}, {1, 8}, {3, 3}, {5, 1}, {1, 12}};
  while (out.samples < configs) {
    const auto& pair = pairs[static_cast<std::size_t>(out.samples) % pairs.size()];
    const auto [d, q] = rng.pick(dq);
    std::vector<i64> a = detail::random_vector(rng, pair.n(), 3);
    for (auto& v : a) v = mod(v, 4);
    if (pair.Q1().eval_mod(a, 4) != 1) continue;
    const auto m = detail::random_vector(rng, pair.n(), 12);
    const auto lhs = T_dq(pair, a, d, q, m, policy);
    const auto rhs = T_dq_factorized(pair, a, d, q, m, policy);
    out.worst = std::max(out.worst, std::abs(lhs.value() - rhs.value()) / (lhs.tol + rhs.tol));
    ++out.samples;
    if (!lhs.agrees(rhs)) out.fail("d=" + std::to_string(d) + " q=" + std::to_string(q) + " a=" + detail::describe(a));
  }
  return out;
}

/// S_{d,q}(h m) = S_{d,q}(m) for h coprime to dq.
inline CheckResult check_unit_scaling(SplitMix64 rng, int configs, const QuadricPair& pair, const ExecPolicy& policy = {}) {
  CheckResult out{"unit-scaling"};
  while (out.samples < configs) {
    const i64 d = rng.range(1, 6), q = rng.range(1, 6), h = rng.range(2, 40);
    if (std::gcd(h, d * q) != 1) continue;
    const auto m = detail::random_vector(rng, pair.n(), 10);
    auto hm = m;
    for (auto& v : hm) v *= h;
    const auto a = S_dq(pair, d, q, m, policy), b = S_dq(pair, d, q, hm, policy);
    out.worst = std::max(out.worst, std::abs(a.value() - b.value()) / (a.tol + b.tol));
    ++out.samples;
    if (!a.agrees(b)) out.fail("d=" + std::to_string(d) + " q=" + std::to_string(q) + " h=" + std::to_string(h));
  }
  return out;
}

// ---------------------------------------------------------------------------
// vanishing

/// D_{p^2}(m) = 0 when p is certified good, p does not divide m and V_m is
/// smooth mod p. worst = max |D| / tolerance.
inline CheckResult check_D_prime_square(SplitMix64 rng, int wanted, const std::vector<std::pair<QuadricPair, i64>>& cases,
                                        const ExecPolicy& policy = {}) {
  CheckResult out{"D-prime-square-vanishing"};
  std::vector<std::pair<const QuadricPair*, i64>> usable;
  for (const auto& [pair, p] : cases)
    if (certified_good(pair, p)) usable.emplace_back(&pair, p);
  if (usable.empty()) {
    out.fail("no certified-good prime");
    return out;
  }
  for (int attempts = 0; out.samples < wanted && attempts < 50 * wanted; ++attempts) {
    const auto [pair, p] = rng.pick(usable);
    const auto m = detail::random_vector(rng, pair->n(), 3 * p);
    if (std::all_of(m.begin(), m.end(), [p](i64 v) { return v % p == 0; })) continue;
    if (is_Vm_singular_mod_p(*pair, m, p, policy)) continue;
    const auto D = D_d(*pair, p * p, m, policy);
    out.worst = std::max(out.worst, D.abs() / D.tol);
    ++out.samples;
    if (!D.vanishes()) out.fail("p=" + std::to_string(p) + " m=" + detail::describe(m));
  }
  if (out.samples < wanted) out.fail("only " + std::to_string(out.samples) + " admissible samples");
  return out;
}

/// M_{p,p}(m) = 0 when p does not divide 2 det(M2) Q2*(m).
inline CheckResult check_mixed_vanishing(SplitMix64 rng, int wanted, const std::vector<std::pair<QuadricPair, i64>>& cases,
                                         const ExecPolicy& policy = {}) {
  CheckResult out{"mixed-vanishing"};
  std::vector<std::pair<const QuadricPair*, i64>> usable;
  for (const auto& [pair, p] : cases)
    if (mod(2 * pair.det2(), p) != 0) usable.emplace_back(&pair, p);
  if (usable.empty()) {
    out.fail("no admissible prime");
    return out;
  }
  for (int attempts = 0; out.samples < wanted && attempts < 50 * wanted; ++attempts) {
    const auto [pair, p] = rng.pick(usable);
    const auto m = detail::random_vector(rng, pair->n(), 3 * p);
    if (mod(pair->dual2().eval(m), p) == 0) continue;
    const auto M = M_mixed(*pair, p, 1, 1, m, policy);
    out.worst = std::max(out.worst, M.abs() / M.tol);
    ++out.samples;
    if (!M.vanishes()) out.fail("p=" + std::to_string(p) + " m=" + detail::describe(m));
  }
  if (out.samples < wanted) out.fail("only " + std::to_string(out.samples) + " admissible samples");
  return out;
}

// ---------------------------------------------------------------------------
// bounds

/// Fits C_r = max_m |Q_{p^r}(m)| / p^{r(n/2+1)} for each r and requires every
/// C_r within `spread` of C_1. Uses the factorized path, so Q2 must be
/// diagonal. worst = max |C_r / C_1 - 1|.
inline CheckResult check_Q_growth(SplitMix64 rng, const QuadricPair& pair, const std::vector<i64>& primes, int r_max, int samples,
                                  double spread = 0.10, const ExecPolicy& policy = {}) {
  CheckResult out{"Q-growth"};
  const int n = pair.n();
  for (i64 p : primes) {
    double C1 = 0.0;
    for (int r = 1; r <= r_max; ++r) {
      const i64 q = ipow(p, r);
      double C = 0.0;
      for (int s = 0; s <= samples; ++s) {
        const auto m = s == 0 ? std::vector<i64>(static_cast<std::size_t>(n), 0) : detail::random_vector(rng, n, q);
        C = std::max(C, Q_q(pair, q, m, policy, SumRoute::Diagonal).abs() / std::pow(static_cast<double>(q), n / 2.0 + 1));
        ++out.samples;
      }
      if (r == 1) C1 = C;
      const double dev = C1 > 0 ? std::abs(C / C1 - 1) : 1.0;
      out.worst = std::max(out.worst, dev);
      if (dev > spread) out.fail("p=" + std::to_string(p) + " r=" + std::to_string(r));
    }
  }
  return out;
}

/// rho(p^r) <= C p^{r(n-2)} (1 + r) with C fitted at r = 1 over all primes and
/// allowed `slack` growth. worst = max ratio / C.
inline CheckResult check_rho_growth(const QuadricPair& pair, const std::vector<i64>& primes, int r_max, double slack = 0.10,
                                    const ExecPolicy& policy = {}) {
  CheckResult out{"rho-growth"};
  const int n = pair.n();
  auto ratio = [&](i64 p, int r) {
    const double value = p == 2 ? static_cast<double>(rho(pair, ipow(p, r), policy))
                                : static_cast<double>(rho_lifted(pair, PrimePower::make(p, r), policy));
    return value / std::pow(static_cast<double>(p), r * (n - 2.0)) / (1 + r);
  };
  double C = 0.0;
  for (i64 p : primes) C = std::max(C, ratio(p, 1));
  for (i64 p : primes)
    for (int r = 1; r <= r_max; ++r) {
      const double t = ratio(p, r) / C;
      out.worst = std::max(out.worst, t);
      ++out.samples;
      if (t > 1 + slack) out.fail("p=" + std::to_string(p) + " r=" + std::to_string(r));
    }
  return out;
}

/// Size classes of D_p(m) at good primes: exponent (n-2)/2 for smooth V_m,
/// (n-1)/2 for singular V_m with p not dividing m, and n-2 when p | m. The
/// constant fitted on the smaller primes must still hold, up to a factor
/// `slack`, on the larger ones. worst = max (C_large / C_small) over classes.
inline CheckResult check_D_prime_classes(SplitMix64 rng, const QuadricPair& pair, const std::vector<i64>& primes, int samples,
                                         double slack = 1.5, const ExecPolicy& policy = {}) {
  CheckResult out{"D-prime-size-classes"};
  const int n = pair.n();
  std::vector<i64> good;
  for (i64 p : primes)
    if (certified_good(pair, p)) good.push_back(p);
  if (good.size() < 2) {
    out.fail("fewer than two certified-good primes");
    return out;
  }
  const std::size_t half = good.size() / 2;
  double C[2][3] = {{0, 0, 0}, {0, 0, 0}};
  for (std::size_t i = 0; i < good.size(); ++i) {
    const i64 p = good[i];
    for (int s = 0; s < samples; ++s) {
      auto m = detail::random_vector(rng, n, 2 * p);
      if (s % 8 == 0)
        for (auto& v : m) v *= p;
      const bool divides = std::all_of(m.begin(), m.end(), [p](i64 v) { return v % p == 0; });
      const int cls = divides ? 2 : is_Vm_singular_mod_p(pair, m, p, policy) ? 1 : 0;
      const double e = cls == 0 ? (n - 2) / 2.0 : cls == 1 ? (n - 1) / 2.0 : n - 2.0;
      auto& c = C[i < half ? 0 : 1][cls];
      c = std::max(c, D_d(pair, p, m, policy).abs() / std::pow(static_cast<double>(p), e));
      ++out.samples;
    }
  }
  for (int cls = 0; cls < 3; ++cls) {
    if (C[1][cls] == 0.0) continue;
    const double t = C[0][cls] > 0 ? C[1][cls] / C[0][cls] : slack + 1;
    out.worst = std::max(out.worst, t);
    if (t > slack) out.fail("class " + std::to_string(cls));
  }
  return out;
}

/// count_lincong against enumeration on random instances, and against the
/// Smith-minor bound multiplied over the prime powers of q.
inline CheckResult check_lincong(SplitMix64 rng, int instances, i64 max_q = 64) {
  CheckResult out{"lincong-count"};
  for (int it = 0; it < instances; ++it) {
    const int n = static_cast<int>(rng.range(1, 3));
    IntegerMatrix M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = rng.range(-6, 6);
    if (it % 4 == 0) M = M * M.scaled(2);
    const i64 q = rng.range(1, max_q);
    const auto a = it % 3 == 0 ? M.apply(detail::random_vector(rng, n, q)) : detail::random_vector(rng, n, q);
    i64 brute = 0;
    std::vector<i64> x(static_cast<std::size_t>(n), 0);
    for (;;) {
      const auto y = M.apply(x);
      bool ok = true;
      for (int i = 0; i < n; ++i) ok = ok && mod(y[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)], q) == 0;
      brute += ok;
      int i = n - 1;
      while (i >= 0 && ++x[static_cast<std::size_t>(i)] == q) x[static_cast<std::size_t>(i--)] = 0;
      if (i < 0) break;
    }
    const i64 count = count_lincong(M, a, q);
    double bound = 1.0;
    for (const auto& pp : factorize(q)) bound *= static_cast<double>(smith_bound(M, pp));
    ++out.samples;
    if (count != brute) out.fail("count mismatch at q=" + std::to_string(q));
    if (static_cast<double>(count) > bound) out.fail("bound exceeded at q=" + std::to_string(q));
    if (bound > 0) out.worst = std::max(out.worst, static_cast<double>(count) / bound);
  }
  return out;
}

// ---------------------------------------------------------------------------
// densities

/// Closed forms for #{(u, v) mod p^k : u^2 + v^2 = A} against enumeration, for
/// every residue A (odd A and k >= 2 at p = 2).
inline CheckResult check_two_squares(const std::vector<i64>& primes, int k_max) {
  CheckResult out{"two-squares"};
  for (i64 p : primes)
    for (int k = p == 2 ? 2 : 1; k <= k_max; ++k) {
      const i64 q = ipow(p, k);
      for (i64 A = 0; A < q; ++A) {
        if (p == 2 && A % 2 == 0) continue;
        ++out.samples;
        if (two_squares_count(A, p, k) != two_squares_closed_form(A, p, k)) {
          out.worst += 1;
          out.fail("p=" + std::to_string(p) + " k=" + std::to_string(k) + " A=" + std::to_string(A));
        }
      }
    }
  return out;
}

/// sigma_p at k = 1 and k = 2 as exact rationals, at every certified-good odd
/// p <= p_max. Pairs with n < 3 are skipped.
inline CheckResult check_hensel(const std::vector<QuadricPair>& pairs, i64 p_max, const ExecPolicy& policy = {}) {
  CheckResult out{"hensel-stability"};
  for (const auto& pair : pairs) {
    if (pair.n() < 3) continue;
    for (i64 p : primes_up_to(p_max)) {
      if (p == 2 || !certified_good(pair, p, p_max)) continue;
      ++out.samples;
      if (sigma_p_stabilized(pair, p, 1, policy) != sigma_p_stabilized(pair, p, 2, policy)) {
        out.worst += 1;
        out.fail(pair.name() + " p=" + std::to_string(p));
      }
    }
  }
  return out;
}

/// The slab and coarea estimates of tau_infinity agree within `spread`, and
/// halving eps at the finest rung moves the slab value by less than `halving`.
inline CheckResult check_real_density(const std::vector<QuadricPair>& pairs, double spread = 0.05, double halving = 0.02,
                                      const ExecPolicy& policy = {}) {
  CheckResult out{"real-density"};
  for (const auto& pair : pairs) {
    const auto t = tau_infinity(pair.Q2(), default_weight(pair), {}, policy);
    ++out.samples;
    out.worst = std::max({out.worst, t.spread, t.halving_change});
    if (!(t.slab > 0.0)) out.fail(pair.name() + " zero density");
    if (!(t.spread < spread)) out.fail(pair.name() + " estimators disagree");
    if (!(t.halving_change < halving)) out.fail(pair.name() + " eps not settled");
  }
  return out;
}

// ---------------------------------------------------------------------------
// suites

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"gauss", "multiplicativity", "vanishing", "bounds", "densities", "all"};
  return names;
}

/// The pairs the suites run on: the shipped ones when a data directory is
/// known, otherwise built-in copies of the same forms.
inline std::vector<QuadricPair> builtin_pairs() {
  return {QuadricPair(QuadraticForm::sum_of_squares(2), QuadraticForm(IntegerMatrix::from_row_major(2, 2, {0, 1, 1, 0})), "toy2"),
          QuadricPair(QuadraticForm::sum_of_squares(3), QuadraticForm::diagonal({1, 2, -3}), "tern3"),
          QuadricPair(QuadraticForm::sum_of_squares(4), QuadraticForm::diagonal({1, 2, -3, -5}), "quat4"),
          QuadricPair(QuadraticForm::sum_of_squares(5), QuadraticForm::diagonal({1, 2, 3, -4, -5}), "main5")};
}

inline VerifyReport run_suite(const std::string& suite, std::uint64_t seed, const ExecPolicy& policy = {}) {
  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    throw InvalidArgument("verify: unknown suite '" + suite + "'");
  VerifyReport rep;
  rep.suite = suite;
  rep.seed = seed;
  const SplitMix64 root(seed);
  const auto pairs = builtin_pairs();
  const auto& tern3 = pairs[1];
  const auto& quat4 = pairs[2];
  const auto& main5 = pairs[3];
  const bool all = suite == "all";

  if (all || suite == "gauss") {
    rep.checks.push_back(check_gauss_1d({3, 5, 7, 11, 13}, 343));
    rep.checks.push_back(check_expQ(root.split("expQ"), {3, 4, 5, 7}, {3, 5, 7, 9, 25, 27}, 3, policy));
    rep.checks.push_back(check_gauss_sum_bound(root.split("gauss-sum-bound"), 80, policy));
  }
  if (all || suite == "multiplicativity") {
    rep.checks.push_back(check_multiplicativity(root.split("mult"), 100, 12, policy));
    rep.checks.push_back(check_T_factorization(root.split("T"), 20, {tern3, quat4}, policy));
    rep.checks.push_back(check_unit_scaling(root.split("unit"), 20, tern3, policy));
  }
  if (all || suite == "vanishing") {
    rep.checks.push_back(check_D_prime_square(root.split("Dp2"), 50, {{tern3, 7}, {tern3, 11}, {tern3, 13}, {quat4, 7}}, policy));
    rep.checks.push_back(check_mixed_vanishing(root.split("mixed"), 30, {{tern3, 5}, {tern3, 7}, {tern3, 11}, {quat4, 7}, {quat4, 11}}, policy));
  }
  if (all || suite == "bounds") {
    rep.checks.push_back(check_gauss_sum_bound(root.split("bounds-gauss"), 120, policy));
    rep.checks.push_back(check_Q_growth(root.split("Q-growth"), quat4, {7, 11}, 3, 6, 0.10, policy));
    rep.checks.push_back(check_rho_growth(main5, {2, 3, 5, 7}, 3, 0.10, policy));
    rep.checks.push_back(check_D_prime_classes(root.split("D-classes"), tern3, {7, 11, 13, 17, 19, 23}, 24, 1.5, policy));
    rep.checks.push_back(check_lincong(root.split("lincong"), 200));
  }
  if (all || suite == "densities") {
    rep.checks.push_back(check_two_squares({2, 3, 5, 7, 13}, 3));
    rep.checks.push_back(check_hensel(pairs, 23, policy));
    rep.checks.push_back(check_real_density(pairs, 0.05, 0.02, policy));
  }
  return rep;
}

}  // namespace qc
