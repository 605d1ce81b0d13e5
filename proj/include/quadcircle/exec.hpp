#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "quadcircle/error.hpp"

namespace qc {

/// Execution settings shared by every heavy loop in the library.
struct ExecPolicy {
  unsigned workers = 1;
  /// Upper bound on elementary operations a single call may perform.
  double guard = 1e9;
};

inline void check_guard(double work, const ExecPolicy& policy, const std::string& what) {
  if (!(work <= policy.guard)) {
    throw ResourceLimit(what + ": estimated work " + std::to_string(work) +
                        " exceeds guard " + std::to_string(policy.guard));
  }
}

/// Evaluates `fn(slab)` for slab = 0..count-1 and returns the results indexed
/// by slab. Workers pull slabs from a shared counter, but since every result
/// lands in its own slot and callers reduce in slab order, the final value
/// does not depend on the worker count.
template <class T, class Fn>
std::vector<T> map_slabs(std::size_t count, unsigned workers, Fn&& fn) {
  std::vector<T> out(count);
  if (workers <= 1 || count <= 1) {
    for (std::size_t s = 0; s < count; ++s) out[s] = fn(s);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t s = next++; s < count; s = next++) out[s] = fn(s);
      } catch (...) {
        errors[w] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace qc
