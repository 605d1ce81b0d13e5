#pragma once

// Incremental walk over residue systems (Z/NZ)^n.
//
// The walker keeps Q(k) mod L and the gradient M k mod L for each tracked
// form (L | N), plus one linear form m.k mod N. An odometer step changes a
// coordinate either by +1 or from N-1 back to 0; both are +1 modulo N, so
// every update is the same rank-one correction.

#include <cstdint>
#include <vector>

#include "quadcircle/lincong.hpp"
#include "quadcircle/modarith.hpp"

namespace qc {

/// Residues of a vector with respect to a stated modulus.
struct ResidueVector {
  std::vector<i64> coords;
  i64 modulus = 1;

  static ResidueVector reduce(const std::vector<i64>& v, i64 modulus) {
    if (modulus < 1) throw InvalidArgument("ResidueVector: modulus must be positive");
    ResidueVector r{v, modulus};
    for (auto& c : r.coords) c = mod(c, modulus);
    return r;
  }
};

class ResidueWalker {
 public:
  struct Tracked {
    const IntegerMatrix* M;
    i64 L;
  };

  /// Walks k with k_0..k_{prefix-1} fixed to `prefix` and the remaining
  /// coordinates over [0, N).
  ResidueWalker(int n, i64 N, std::vector<Tracked> forms, std::vector<i64> linear, std::vector<i64> prefix)
      : n_(n), N_(N), forms_(std::move(forms)), lin_(std::move(linear)), k_(static_cast<std::size_t>(n), 0) {
    if (static_cast<int>(prefix.size()) > n) throw InvalidArgument("ResidueWalker: prefix longer than dimension");
    free_from_ = static_cast<int>(prefix.size());
    for (std::size_t i = 0; i < prefix.size(); ++i) k_[i] = mod(prefix[i], N_);
    for (auto& v : lin_) v = mod(v, N_);
    values_.resize(forms_.size());
    grads_.resize(forms_.size());
    for (std::size_t f = 0; f < forms_.size(); ++f) {
      const IntegerMatrix& M = *forms_[f].M;
      const i64 L = forms_[f].L;
      grads_[f].assign(static_cast<std::size_t>(n), 0);
      i128 q = 0;
      for (int i = 0; i < n; ++i) {
        i128 g = 0;
        for (int j = 0; j < n; ++j) g += static_cast<i128>(M(i, j)) * k_[static_cast<std::size_t>(j)];
        grads_[f][static_cast<std::size_t>(i)] = static_cast<i64>(((g % L) + L) % L);
        q += g % L * k_[static_cast<std::size_t>(i)];
      }
      values_[f] = static_cast<i64>(((q % L) + L) % L);
    }
    linval_ = 0;
    if (!lin_.empty())
      for (int i = 0; i < n; ++i) linval_ = mod(linval_ + mulmod(lin_[static_cast<std::size_t>(i)], k_[static_cast<std::size_t>(i)], N_), N_);
  }

  const std::vector<i64>& k() const { return k_; }
  i64 value(std::size_t form) const { return values_[form]; }
  i64 linear() const { return linval_; }

  /// Advances to the next residue vector; false once the walk is exhausted.
  bool next() {
    for (int i = n_ - 1; i >= free_from_; --i) {
      const bool wraps = k_[static_cast<std::size_t>(i)] == N_ - 1;
      k_[static_cast<std::size_t>(i)] = wraps ? 0 : k_[static_cast<std::size_t>(i)] + 1;
      step(i);
      if (!wraps) return true;
    }
    return false;
  }

 private:
  void step(int i) {
    const auto ui = static_cast<std::size_t>(i);
    for (std::size_t f = 0; f < forms_.size(); ++f) {
      const IntegerMatrix& M = *forms_[f].M;
      const i64 L = forms_[f].L;
      auto& g = grads_[f];
      values_[f] = mod(values_[f] + 2 * g[ui] + M(i, i), L);
      for (int j = 0; j < n_; ++j) g[static_cast<std::size_t>(j)] = mod(g[static_cast<std::size_t>(j)] + M(j, i), L);
    }
    if (!lin_.empty()) linval_ = mod(linval_ + lin_[ui], N_);
  }

  int n_;
  i64 N_;
  int free_from_ = 0;
  std::vector<Tracked> forms_;
  std::vector<i64> lin_;
  std::vector<i64> k_;
  std::vector<i64> values_;
  std::vector<std::vector<i64>> grads_;
  i64 linval_ = 0;
};

}  // namespace qc
