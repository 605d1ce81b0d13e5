#pragma once

// Integer matrices, the Smith normal form, and exact counts of solutions of
// linear congruence systems M x = a (mod q).

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "quadcircle/error.hpp"
#include "quadcircle/modarith.hpp"

namespace qc {

namespace detail {
inline i64 checked_mul(i64 a, i64 b) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow("integer matrix: multiplication overflow");
  return r;
}
inline i64 checked_add(i64 a, i64 b) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow("integer matrix: addition overflow");
  return r;
}
inline i64 narrow(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw ArithmeticOverflow("integer matrix: value exceeds 64 bits");
  return static_cast<i64>(v);
}
}  // namespace detail

class IntegerMatrix {
 public:
  IntegerMatrix() = default;
  IntegerMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), 0) {}
  IntegerMatrix(std::initializer_list<std::initializer_list<i64>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != cols_) throw InvalidArgument("IntegerMatrix: ragged rows");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static IntegerMatrix from_row_major(int rows, int cols, const std::vector<i64>& entries) {
    if (static_cast<int>(entries.size()) != rows * cols)
      throw InvalidArgument("IntegerMatrix: expected " + std::to_string(rows * cols) + " entries, got " +
                            std::to_string(entries.size()));
    IntegerMatrix m(rows, cols);
    m.data_ = entries;
    return m;
  }

  static IntegerMatrix identity(int n) {
    IntegerMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static IntegerMatrix diagonal(const std::vector<i64>& d) {
    const int n = static_cast<int>(d.size());
    IntegerMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  i64& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  i64 operator()(int i, int j) const { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  const std::vector<i64>& entries() const { return data_; }

  bool operator==(const IntegerMatrix&) const = default;

  bool is_symmetric() const {
    if (!square()) return false;
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < i; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  bool is_diagonal() const {
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if (i != j && (*this)(i, j) != 0) return false;
    return true;
  }

  IntegerMatrix operator*(const IntegerMatrix& o) const {
    if (cols_ != o.rows_) throw InvalidArgument("IntegerMatrix: dimension mismatch in product");
    IntegerMatrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < o.cols_; ++j) {
        i128 s = 0;
        for (int k = 0; k < cols_; ++k) s += static_cast<i128>((*this)(i, k)) * o(k, j);
        r(i, j) = detail::narrow(s);
      }
    return r;
  }

  std::vector<i64> apply(const std::vector<i64>& x) const {
    if (static_cast<int>(x.size()) != cols_) throw InvalidArgument("IntegerMatrix: dimension mismatch in apply");
    std::vector<i64> y(static_cast<std::size_t>(rows_));
    for (int i = 0; i < rows_; ++i) {
      i128 s = 0;
      for (int k = 0; k < cols_; ++k) s += static_cast<i128>((*this)(i, k)) * x[static_cast<std::size_t>(k)];
      y[static_cast<std::size_t>(i)] = detail::narrow(s);
    }
    return y;
  }

  IntegerMatrix scaled(i64 c) const {
    IntegerMatrix r = *this;
    for (auto& v : r.data_) v = detail::checked_mul(v, c);
    return r;
  }

  IntegerMatrix operator+(const IntegerMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidArgument("IntegerMatrix: dimension mismatch in sum");
    IntegerMatrix r = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] = detail::checked_add(r.data_[k], o.data_[k]);
    return r;
  }

  IntegerMatrix submatrix(const std::vector<int>& rows, const std::vector<int>& cols) const {
    IntegerMatrix r(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < cols.size(); ++j) r(static_cast<int>(i), static_cast<int>(j)) = (*this)(rows[i], cols[j]);
    return r;
  }

  void swap_rows(int a, int b) {
    for (int j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(int a, int b) {
    for (int i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }
  /// row[dst] += c * row[src]
  void add_row(int dst, int src, i64 c) {
    for (int j = 0; j < cols_; ++j)
      (*this)(dst, j) = detail::checked_add((*this)(dst, j), detail::checked_mul(c, (*this)(src, j)));
  }
  /// col[dst] += c * col[src]
  void add_col(int dst, int src, i64 c) {
    for (int i = 0; i < rows_; ++i)
      (*this)(i, dst) = detail::checked_add((*this)(i, dst), detail::checked_mul(c, (*this)(i, src)));
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<i64> data_;
};

/// Determinant by fraction-free (Bareiss) elimination in 128-bit arithmetic.
inline i64 determinant(const IntegerMatrix& m) {
  if (!m.square()) throw InvalidArgument("determinant: matrix not square");
  const int n = m.rows();
  if (n == 0) return 1;
  std::vector<i128> a(m.entries().begin(), m.entries().end());
  auto at = [&](int i, int j) -> i128& { return a[static_cast<std::size_t>(i * n + j)]; };
  i128 prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (at(k, k) == 0) {
      int piv = -1;
      for (int i = k + 1; i < n; ++i)
        if (at(i, k) != 0) {
          piv = i;
          break;
        }
      if (piv < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(at(k, j), at(piv, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        const i128 num = at(i, j) * at(k, k) - at(i, k) * at(k, j);
        at(i, j) = num / prev;
        if (at(i, j) > (i128{1} << 100) || at(i, j) < -(i128{1} << 100))
          throw ArithmeticOverflow("determinant: intermediate overflow");
      }
      at(i, k) = 0;
    }
    prev = at(k, k);
  }
  return detail::narrow(sign * at(n - 1, n - 1));
}

/// Rank over the rationals, by fraction-free elimination.
inline int rank(const IntegerMatrix& m) {
  const int R = m.rows(), C = m.cols();
  std::vector<i128> a(m.entries().begin(), m.entries().end());
  auto at = [&](int i, int j) -> i128& { return a[static_cast<std::size_t>(i * C + j)]; };
  i128 prev = 1;
  int r = 0;
  for (int c = 0; c < C && r < R; ++c) {
    int piv = -1;
    for (int i = r; i < R; ++i)
      if (at(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    for (int j = 0; j < C; ++j) std::swap(at(r, j), at(piv, j));
    for (int i = r + 1; i < R; ++i) {
      for (int j = c + 1; j < C; ++j) {
        at(i, j) = (at(i, j) * at(r, c) - at(i, c) * at(r, j)) / prev;
        if (at(i, j) > (i128{1} << 100) || at(i, j) < -(i128{1} << 100))
          throw ArithmeticOverflow("rank: intermediate overflow");
      }
      at(i, c) = 0;
    }
    prev = at(r, c);
    ++r;
  }
  return r;
}

/// Rank of m modulo a prime p.
inline int rank_mod_p(const IntegerMatrix& m, i64 p) {
  const int R = m.rows(), C = m.cols();
  std::vector<i64> a(m.entries().size());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = mod(m.entries()[k], p);
  auto at = [&](int i, int j) -> i64& { return a[static_cast<std::size_t>(i * C + j)]; };
  int r = 0;
  for (int c = 0; c < C && r < R; ++c) {
    int piv = -1;
    for (int i = r; i < R; ++i)
      if (at(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    for (int j = 0; j < C; ++j) std::swap(at(r, j), at(piv, j));
    const i64 inv = invmod(at(r, c), p);
    for (int j = 0; j < C; ++j) at(r, j) = mulmod(at(r, j), inv, p);
    for (int i = 0; i < R; ++i) {
      if (i == r || at(i, c) == 0) continue;
      const i64 f = at(i, c);
      for (int j = 0; j < C; ++j) at(i, j) = mod(at(i, j) - mulmod(f, at(r, j), p), p);
    }
    ++r;
  }
  return r;
}

/// Basis of the kernel of m modulo a prime p (vectors with entries in [0, p)).
inline std::vector<std::vector<i64>> kernel_mod_p(const IntegerMatrix& m, i64 p) {
  const int R = m.rows(), C = m.cols();
  std::vector<i64> a(m.entries().size());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = mod(m.entries()[k], p);
  auto at = [&](int i, int j) -> i64& { return a[static_cast<std::size_t>(i * C + j)]; };
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < C && r < R; ++c) {
    int piv = -1;
    for (int i = r; i < R; ++i)
      if (at(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    for (int j = 0; j < C; ++j) std::swap(at(r, j), at(piv, j));
    const i64 inv = invmod(at(r, c), p);
    for (int j = 0; j < C; ++j) at(r, j) = mulmod(at(r, j), inv, p);
    for (int i = 0; i < R; ++i) {
      if (i == r || at(i, c) == 0) continue;
      const i64 f = at(i, c);
      for (int j = 0; j < C; ++j) at(i, j) = mod(at(i, j) - mulmod(f, at(r, j), p), p);
    }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<std::vector<i64>> basis;
  for (int f = 0; f < C; ++f) {
    if (std::find(pivot_col.begin(), pivot_col.end(), f) != pivot_col.end()) continue;
    std::vector<i64> v(static_cast<std::size_t>(C), 0);
    v[static_cast<std::size_t>(f)] = 1;
    for (int i = 0; i < r; ++i) v[static_cast<std::size_t>(pivot_col[static_cast<std::size_t>(i)])] = mod(-at(i, f), p);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// U M V = diag(d) with U, V unimodular, d_1 | d_2 | ... and d_i >= 0.
struct SmithDecomposition {
  IntegerMatrix A;  // row transform (rows x rows)
  IntegerMatrix B;  // column transform (cols x cols)
  std::vector<i64> d;

  int rank() const {
    return static_cast<int>(std::count_if(d.begin(), d.end(), [](i64 v) { return v != 0; }));
  }
};

/// Smith normal form with least-absolute-value pivoting and explicit
/// accumulation of both transforms.
inline SmithDecomposition smith(const IntegerMatrix& M) {
  const int R = M.rows(), C = M.cols();
  IntegerMatrix D = M, U = IntegerMatrix::identity(R), V = IntegerMatrix::identity(C);
  const int steps = std::min(R, C);
  for (int t = 0; t < steps; ++t) {
    for (;;) {
      int bi = -1, bj = -1;
      i64 best = 0;
      for (int i = t; i < R; ++i)
        for (int j = t; j < C; ++j) {
          const i64 v = D(i, j) < 0 ? -D(i, j) : D(i, j);
          if (v != 0 && (best == 0 || v < best)) {
            best = v;
            bi = i;
            bj = j;
          }
        }
      if (bi < 0) goto finished;  // remaining block is zero
      if (bi != t) {
        D.swap_rows(t, bi);
        U.swap_rows(t, bi);
      }
      if (bj != t) {
        D.swap_cols(t, bj);
        V.swap_cols(t, bj);
      }
      bool clean = true;
      for (int i = t + 1; i < R; ++i) {
        const i64 q = D(i, t) / D(t, t);
        if (q != 0) {
          D.add_row(i, t, -q);
          U.add_row(i, t, -q);
        }
        if (D(i, t) != 0) clean = false;
      }
      for (int j = t + 1; j < C; ++j) {
        const i64 q = D(t, j) / D(t, t);
        if (q != 0) {
          D.add_col(j, t, -q);
          V.add_col(j, t, -q);
        }
        if (D(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      int bad = -1;
      for (int i = t + 1; i < R && bad < 0; ++i)
        for (int j = t + 1; j < C; ++j)
          if (D(i, j) % D(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      D.add_row(t, bad, 1);
      U.add_row(t, bad, 1);
    }
    if (D(t, t) < 0) {
      for (int j = 0; j < C; ++j) D(t, j) = -D(t, j);
      for (int j = 0; j < R; ++j) U(t, j) = -U(t, j);
    }
  }
finished:
  std::vector<i64> d(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) d[static_cast<std::size_t>(i)] = D(i, i);
  return {std::move(U), std::move(V), std::move(d)};
}

/// K_q(M; a) = #{x mod q : M x = a (mod q)}, via the Smith form at each prime
/// power dividing q.
inline i64 count_lincong(const IntegerMatrix& M, const std::vector<i64>& a, i64 q) {
  if (q < 1) throw InvalidArgument("count_lincong: q must be positive");
  if (static_cast<int>(a.size()) != M.rows()) throw InvalidArgument("count_lincong: rhs dimension mismatch");
  if (q == 1) return 1;
  const SmithDecomposition s = smith(M);
  const std::vector<i64> b = s.A.apply(a);
  const int R = M.rows(), C = M.cols();
  i64 total = 1;
  for (const auto& pp : factorize(q)) {
    const i64 pr = pp.value;
    i64 count = 1;
    for (int i = 0; i < R; ++i) {
      const i64 di = i < C ? s.d[static_cast<std::size_t>(i)] : 0;
      const i64 g = std::gcd(di, pr);  // gcd(0, p^r) = p^r
      if (mod(b[static_cast<std::size_t>(i)], g) != 0) return 0;
      if (i < C) count = detail::checked_mul(count, g);
    }
    for (int j = R; j < C; ++j) count = detail::checked_mul(count, pr);
    total = detail::checked_mul(total, count);
  }
  return total;
}

/// min{p^{nr}, p^{(n - rho) r + delta_p}}, with delta_p the least p-adic order
/// among the non-singular rho x rho minors of M (computed from the minors
/// directly, independently of the Smith form). Saturates at INT64_MAX.
inline i64 smith_bound(const IntegerMatrix& M, const PrimePower& q) {
  if (!M.square()) throw InvalidArgument("smith_bound: matrix must be square");
  const int n = M.rows();
  const int rho = rank(M);
  const i64 trivial = ipow_sat(q.p, static_cast<i64>(n) * q.r);
  if (rho == 0) return trivial;
  int delta = -1;
  std::vector<int> rows(static_cast<std::size_t>(rho)), cols(static_cast<std::size_t>(rho));
  // iterate over all rho-subsets of rows and of columns
  std::vector<bool> rsel(static_cast<std::size_t>(n), false);
  std::fill(rsel.begin(), rsel.begin() + rho, true);
  do {
    for (int i = 0, k = 0; i < n; ++i)
      if (rsel[static_cast<std::size_t>(i)]) rows[static_cast<std::size_t>(k++)] = i;
    std::vector<bool> csel(static_cast<std::size_t>(n), false);
    std::fill(csel.begin(), csel.begin() + rho, true);
    do {
      for (int j = 0, k = 0; j < n; ++j)
        if (csel[static_cast<std::size_t>(j)]) cols[static_cast<std::size_t>(k++)] = j;
      const i64 det = determinant(M.submatrix(rows, cols));
      if (det != 0) {
        const int v = vp(det, q.p);
        if (delta < 0 || v < delta) delta = v;
      }
    } while (std::prev_permutation(csel.begin(), csel.end()));
  } while (std::prev_permutation(rsel.begin(), rsel.end()));
  const i64 refined = ipow_sat(q.p, static_cast<i64>(n - rho) * q.r + delta);
  return std::min(trivial, refined);
}

}  // namespace qc
