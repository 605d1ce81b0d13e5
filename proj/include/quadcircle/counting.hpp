#pragma once

// Lattice points on Q2 = 0 in max-norm boxes, the congruence-restricted
// counts N_d(B), and the weighted sum
//
//   S(B) = sum_{x in Z^n, Q2(x) = 0, Q1(x) odd} r(Q1(x)) W(x / B).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "quadcircle/error.hpp"
#include "quadcircle/exec.hpp"
#include "quadcircle/modarith.hpp"
#include "quadcircle/quadforms.hpp"

namespace qc {

/// Closed integer box prod [lo_i, hi_i], optionally restricted to
/// x = residue (mod modulus).
struct BoxSpec {
  std::vector<i64> lo, hi;
  i64 modulus = 0;
  std::vector<i64> residue;

  static BoxSpec centered(int n, double B) {
    if (!(B >= 1.0)) throw InvalidArgument("BoxSpec: B must be at least 1");
    const i64 b = static_cast<i64>(std::floor(B + 1e-9));
    return {std::vector<i64>(static_cast<std::size_t>(n), -b), std::vector<i64>(static_cast<std::size_t>(n), b), 0, {}};
  }

  int n() const { return static_cast<int>(lo.size()); }
  bool empty() const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (lo[i] > hi[i]) return true;
    return false;
  }
  double volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= static_cast<double>(std::max<i64>(0, hi[i] - lo[i] + 1));
    return v;
  }
  bool admits(const std::vector<i64>& x) const {
    if (modulus == 0) return true;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (mod(x[i] - residue[i], modulus) != 0) return false;
    return true;
  }
};

namespace detail {

/// Open-addressing table from a partial quadratic value to a run of
/// half-vectors sharing it.
class ValueIndex {
 public:
  explicit ValueIndex(std::vector<std::pair<i64, std::size_t>> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end());
    std::size_t cap = 16;
    while (cap < 2 * entries_.size()) cap <<= 1;
    mask_ = cap - 1;
    slots_.assign(cap, Slot{});
    for (std::size_t b = 0; b < entries_.size();) {
      std::size_t e = b;
      while (e < entries_.size() && entries_[e].first == entries_[b].first) ++e;
      std::size_t h = hash(entries_[b].first);
      while (slots_[h].used) h = (h + 1) & mask_;
      slots_[h] = Slot{true, entries_[b].first, b, e};
      b = e;
    }
  }

  /// Indices of half-vectors with the given value, in sorted order.
  template <class Fn>
  void for_each(i64 value, Fn&& fn) const {
    std::size_t h = hash(value);
    while (slots_[h].used) {
      if (slots_[h].key == value) {
        for (std::size_t t = slots_[h].begin; t < slots_[h].end; ++t) fn(entries_[t].second);
        return;
      }
      h = (h + 1) & mask_;
    }
  }

 private:
  struct Slot {
    bool used = false;
    i64 key = 0;
    std::size_t begin = 0, end = 0;
  };
  std::size_t hash(i64 v) const {
    auto x = static_cast<std::uint64_t>(v);
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return static_cast<std::size_t>(x) & mask_;
  }
  std::vector<std::pair<i64, std::size_t>> entries_;
  std::vector<Slot> slots_;
  std::size_t mask_ = 0;
};

/// Calls fn(v) for each v in the box restricted to coordinates [from, to).
template <class Fn>
void for_each_in_box(const BoxSpec& box, int from, int to, Fn&& fn) {
  std::vector<i64> v(static_cast<std::size_t>(to - from));
  for (int i = from; i < to; ++i) v[static_cast<std::size_t>(i - from)] = box.lo[static_cast<std::size_t>(i)];
  if (box.empty()) return;
  for (;;) {
    fn(v);
    int i = to - from - 1;
    while (i >= 0) {
      auto& c = v[static_cast<std::size_t>(i)];
      if (c < box.hi[static_cast<std::size_t>(i + from)]) {
        ++c;
        break;
      }
      c = box.lo[static_cast<std::size_t>(i + from)];
      --i;
    }
    if (i < 0) return;
  }
}

inline i64 isqrt_floor(i64 v) {
  if (v < 0) return -1;
  i64 r = static_cast<i64>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

inline bool split_is_block_diagonal(const IntegerMatrix& M, int h) {
  for (int i = 0; i < h; ++i)
    for (int j = h; j < M.cols(); ++j)
      if (M(i, j) != 0) return false;
  return true;
}

inline i64 partial_form(const IntegerMatrix& M, const std::vector<i64>& v, int offset) {
  i128 s = 0;
  const int k = static_cast<int>(v.size());
  for (int i = 0; i < k; ++i) {
    i128 row = 0;
    for (int j = 0; j < k; ++j) row += static_cast<i128>(M(i + offset, j + offset)) * v[static_cast<std::size_t>(j)];
    s += row * v[static_cast<std::size_t>(i)];
  }
  return narrow(s);
}

}  // namespace detail

/// Zeros of Q2 in a box, sorted lexicographically.
///
/// When Q2 has no cross terms between the first ceil(n/2) coordinates and the
/// rest, the halves are matched through a table of partial values. Otherwise
/// the first n-1 coordinates are enumerated and the last is solved for.
inline std::vector<std::vector<i64>> enumerate_zeros(const QuadraticForm& Q2, const BoxSpec& box, const ExecPolicy& policy = {}) {
  const int n = Q2.n();
  if (box.n() != n) throw InvalidArgument("enumerate_zeros: box dimension does not match the form");
  std::vector<std::vector<i64>> out;
  if (box.empty()) return out;
  const auto& M = Q2.matrix();
  const int h = (n + 1) / 2;
  auto width = [&](int i) { return static_cast<double>(box.hi[static_cast<std::size_t>(i)] - box.lo[static_cast<std::size_t>(i)] + 1); };
  double left = 1.0, right = 1.0, all_but_last = 1.0;
  for (int i = 0; i < n; ++i) {
    (i < h ? left : right) *= width(i);
    if (i < n - 1) all_but_last *= width(i);
  }
  if (n >= 2 && detail::split_is_block_diagonal(M, h)) {
    check_guard(left + right, policy, "enumerate_zeros");
    std::vector<std::vector<i64>> us;
    std::vector<std::pair<i64, std::size_t>> entries;
    detail::for_each_in_box(box, 0, h, [&](const std::vector<i64>& u) {
      entries.emplace_back(detail::partial_form(M, u, 0), us.size());
      us.push_back(u);
    });
    const detail::ValueIndex index(std::move(entries));
    // Scan the right half in slabs of its leading coordinate.
    const i64 lo = box.lo[static_cast<std::size_t>(h)], hi = box.hi[static_cast<std::size_t>(h)];
    const auto slabs = map_slabs<std::vector<std::vector<i64>>>(
        static_cast<std::size_t>(hi - lo + 1), policy.workers, [&](std::size_t s) {
          BoxSpec sub = box;
          sub.lo[static_cast<std::size_t>(h)] = sub.hi[static_cast<std::size_t>(h)] = lo + static_cast<i64>(s);
          std::vector<std::vector<i64>> found;
          detail::for_each_in_box(sub, h, n, [&](const std::vector<i64>& v) {
            index.for_each(-detail::partial_form(M, v, h), [&](std::size_t ui) {
              std::vector<i64> x = us[ui];
              x.insert(x.end(), v.begin(), v.end());
              if (box.admits(x)) found.push_back(std::move(x));
            });
          });
          return found;
        });
    for (auto& s : slabs) out.insert(out.end(), s.begin(), s.end());
  } else {
    check_guard(all_but_last, policy, "enumerate_zeros");
    // Q2(y, t) = a t^2 + b t + c with a = M_nn, b = 2 sum_j M_nj y_j, c = Q2(y, 0).
    const int last = n - 1;
    const i64 a = M(last, last);
    const i64 tlo = box.lo[static_cast<std::size_t>(last)], thi = box.hi[static_cast<std::size_t>(last)];
    const std::size_t slabs_n = n >= 2 ? static_cast<std::size_t>(box.hi[0] - box.lo[0] + 1) : 1;
    const auto slabs = map_slabs<std::vector<std::vector<i64>>>(slabs_n, policy.workers, [&](std::size_t s) {
      BoxSpec sub = box;
      if (n >= 2) sub.lo[0] = sub.hi[0] = box.lo[0] + static_cast<i64>(s);
      std::vector<std::vector<i64>> found;
      auto emit = [&](const std::vector<i64>& y, i64 t) {
        if (t < tlo || t > thi) return;
        std::vector<i64> x = y;
        x.push_back(t);
        if (box.admits(x)) found.push_back(std::move(x));
      };
      auto solve = [&](const std::vector<i64>& y) {
        i128 b = 0;
        for (int j = 0; j < last; ++j) b += 2 * static_cast<i128>(M(last, j)) * y[static_cast<std::size_t>(j)];
        const i128 c = last > 0 ? detail::partial_form(M, y, 0) : 0;
        if (a == 0) {
          if (b == 0) {
            if (c == 0)
              for (i64 t = tlo; t <= thi; ++t) emit(y, t);
            return;
          }
          if (c % b == 0) emit(y, static_cast<i64>(-c / b));
          return;
        }
        const i128 disc = b * b - 4 * static_cast<i128>(a) * c;
        if (disc < 0) return;
        const i64 r = detail::isqrt_floor(detail::narrow(disc));
        if (static_cast<i128>(r) * r != disc) return;
        const i128 den = 2 * static_cast<i128>(a);
        std::vector<i64> roots;
        for (i128 num : {-b - r, -b + r})
          if (num % den == 0) roots.push_back(static_cast<i64>(num / den));
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        for (i64 t : roots) emit(y, t);
      };
      if (last == 0) solve({});
      else detail::for_each_in_box(sub, 0, last, solve);
      return found;
    });
    for (auto& s : slabs) out.insert(out.end(), s.begin(), s.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::vector<i64>> enumerate_zeros(const QuadraticForm& Q2, double B, const ExecPolicy& policy = {}) {
  return enumerate_zeros(Q2, BoxSpec::centered(Q2.n(), B), policy);
}

/// Reference scan of the whole box.
inline std::vector<std::vector<i64>> enumerate_zeros_naive(const QuadraticForm& Q2, const BoxSpec& box, const ExecPolicy& policy = {}) {
  check_guard(box.volume(), policy, "enumerate_zeros_naive");
  std::vector<std::vector<i64>> out;
  detail::for_each_in_box(box, 0, box.n(), [&](const std::vector<i64>& x) {
    if (Q2.eval128(x) == 0 && box.admits(x)) out.push_back(x);
  });
  return out;
}

/// N_d(B) = #{|x| <= B : d | Q1(x), Q2(x) = 0}.
inline i64 N_d(const QuadricPair& pair, i64 d, double B, const ExecPolicy& policy = {}) {
  if (d < 1) throw InvalidArgument("N_d: d must be positive");
  i64 count = 0;
  for (const auto& x : enumerate_zeros(pair.Q2(), B, policy)) count += pair.Q1().eval_mod(x, d) == 0;
  return count;
}

/// t -> exp(-1/(1-t)) for t < 1, applied to |y - x0|^2 / rho^2.
struct WeightFunction {
  std::vector<double> x0;
  double rho = 0.0;

  int n() const { return static_cast<int>(x0.size()); }

  double operator()(const std::vector<double>& y) const {
    double t = 0.0;
    for (std::size_t i = 0; i < x0.size(); ++i) t += (y[i] - x0[i]) * (y[i] - x0[i]);
    t /= rho * rho;
    return t < 1.0 ? std::exp(-1.0 / (1.0 - t)) : 0.0;
  }

  void validate() const {
    if (x0.empty()) throw InvalidArgument("WeightFunction: empty centre");
    if (!(rho > 0.0)) throw InvalidArgument("WeightFunction: radius must be positive");
  }

  /// Grid points x0 + rho g with |g| <= 1, g on a lattice of the given step.
  template <class Fn>
  void for_each_grid_point(double step, Fn&& fn) const {
    const int n = this->n();
    const int k = static_cast<int>(std::lround(1.0 / step));
    std::vector<int> idx(static_cast<std::size_t>(n), -k);
    std::vector<double> y(static_cast<std::size_t>(n));
    for (;;) {
      double r2sum = 0.0;
      for (int i = 0; i < n; ++i) {
        const double g = idx[static_cast<std::size_t>(i)] * step;
        r2sum += g * g;
        y[static_cast<std::size_t>(i)] = x0[static_cast<std::size_t>(i)] + rho * g;
      }
      if (r2sum <= 1.0 + 1e-12) fn(y);
      int i = n - 1;
      while (i >= 0 && ++idx[static_cast<std::size_t>(i)] > k) idx[static_cast<std::size_t>(i--)] = -k;
      if (i < 0) return;
    }
  }

  /// The support hypotheses: Q1 > 0 and grad Q1 != 0 on the ball, by grid.
  bool support_ok(const QuadraticForm& Q1, double step = 0.25) const {
    bool ok = true;
    for_each_grid_point(step, [&](const std::vector<double>& y) {
      if (!ok) return;
      if (!(Q1.eval_real(y) > 0.0)) ok = false;
      const auto g = Q1.gradient_real(y);
      double gn = 0.0;
      for (double v : g) gn += v * v;
      if (!(gn > 0.0)) ok = false;
    });
    return ok;
  }
};

namespace detail {

inline double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Newton steps along the gradient onto Q2 = 0, then rescaling to |y| = 1.
inline bool project_to_cone(const QuadraticForm& Q2, std::vector<double>& y) {
  for (int it = 0; it < 60; ++it) {
    const double v = Q2.eval_real(y);
    const auto g = Q2.gradient_real(y);
    double gg = 0.0;
    for (double c : g) gg += c * c;
    if (gg < 1e-24) return false;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= v * g[i] / gg;
    const double len = norm2(y);
    if (len < 1e-9) return false;
    for (double& c : y) c /= len;
    if (std::abs(Q2.eval_real(y)) < 1e-15) return true;
  }
  return std::abs(Q2.eval_real(y)) < 1e-12;
}

}  // namespace detail

/// Default weight: x0 on the real cone Q2 = 0 with |x0| = 1 and Q1(x0) > 0,
/// chosen from a coarse grid followed by Newton projection; rho is the
/// largest value <= |x0|/2 with Q1 > Q1(x0)/2 on the ball (grid-checked).
inline WeightFunction default_weight(const QuadricPair& pair) {
  const int n = pair.n();
  const auto& Q1 = pair.Q1();
  const auto& Q2 = pair.Q2();
  const int k = n <= 5 ? 2 : 1;
  std::vector<int> idx(static_cast<std::size_t>(n), -k);
  std::vector<double> best;
  double best_score = 0.0;
  std::vector<double> y(static_cast<std::size_t>(n));
  for (;;) {
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = static_cast<double>(idx[static_cast<std::size_t>(i)]) / k;
    if (detail::norm2(y) > 0.3) {
      std::vector<double> x = y;
      const double len = detail::norm2(x);
      for (double& c : x) c /= len;
      if (detail::project_to_cone(Q2, x)) {
        // Favour points well inside Q1 > 0 with a non-degenerate cone.
        const double q1 = Q1.eval_real(x);
        const double g2 = detail::norm2(Q2.gradient_real(x));
        const double score = std::min(q1, g2);
        if (q1 > 0.0 && score > best_score + 1e-9) {
          best_score = score;
          best = x;
        }
      }
    }
    int i = n - 1;
    while (i >= 0 && ++idx[static_cast<std::size_t>(i)] > k) idx[static_cast<std::size_t>(i--)] = -k;
    if (i < 0) break;
  }
  if (best.empty()) throw DomainError("default_weight: no real point on Q2 = 0 with Q1 > 0 was found");
  for (double& c : best)
    if (std::abs(c) < 1e-14) c = 0.0;
  WeightFunction W{best, 0.5 * detail::norm2(best)};
  const double half = Q1.eval_real(best) / 2.0;
  const double step = n <= 5 ? 0.25 : 0.5;
  for (int shrink = 0; shrink < 200; ++shrink) {
    bool ok = true;
    W.for_each_grid_point(step, [&](const std::vector<double>& p) {
      if (ok && !(Q1.eval_real(p) > half)) ok = false;
    });
    if (ok) return W;
    W.rho *= 0.95;
  }
  throw DomainError("default_weight: could not fit a ball with Q1 > Q1(x0)/2");
}

struct WeightedCount {
  double B = 0.0;
  double S = 0.0;
  i64 points = 0;  // zeros of Q2 in supp W(./B) with Q1 odd
  double normalized(int n) const { return S / std::pow(B, n - 2); }
};

/// S(B). The zeros are summed in lexicographic order.
inline WeightedCount S_of_B(const QuadricPair& pair, const WeightFunction& W, double B, const ExecPolicy& policy = {}) {
  W.validate();
  if (W.n() != pair.n()) throw InvalidArgument("S_of_B: weight and pair have different dimensions");
  if (!(B > 0.0)) throw InvalidArgument("S_of_B: B must be positive");
  const int n = pair.n();
  BoxSpec box;
  for (int i = 0; i < n; ++i) {
    const double c = W.x0[static_cast<std::size_t>(i)];
    box.lo.push_back(static_cast<i64>(std::ceil(B * (c - W.rho))));
    box.hi.push_back(static_cast<i64>(std::floor(B * (c + W.rho))));
  }
  WeightedCount out{B, 0.0, 0};
  std::vector<double> y(static_cast<std::size_t>(n));
  for (const auto& x : enumerate_zeros(pair.Q2(), box, policy)) {
    const i64 q1 = pair.Q1().eval(x);
    if (q1 <= 0 || q1 % 2 == 0) continue;
    for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = static_cast<double>(x[static_cast<std::size_t>(i)]) / B;
    const double w = W(y);
    if (w == 0.0) continue;
    out.S += static_cast<double>(r2(q1)) * w;
    ++out.points;
  }
  return out;
}

inline std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

inline void write_counts_csv(std::ostream& os, const std::vector<WeightedCount>& rows, int n) {
  os << "B,S_B,S_over_Bn2\n";
  for (const auto& r : rows) os << format_number(r.B) << ',' << format_number(r.S) << ',' << format_number(r.normalized(n)) << '\n';
}

}  // namespace qc
