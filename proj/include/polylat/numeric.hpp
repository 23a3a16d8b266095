#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace polylat {

/// Working precision for criterion values, kernel sums and the fast CBC.
///
/// The quality criterion of a good rule decays like N^{-2 alpha}, so at
/// N = 2^12 it sits around 1e-15 while the individual point terms are O(1).
/// The x87 extended format keeps ~4 extra decimal digits over double, which
/// is what makes the cancellation in the point form tolerable.
using real = long double;

/// Neumaier (improved Kahan-Babuska) compensated accumulator.
template <typename T>
class CompensatedSum {
 public:
  void add(T x) {
    const T t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(T x) {
    add(x);
    return *this;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{0};
  T comp_{0};
};

/// Deterministic parallel reduction over [0, n).
///
/// The index range is cut into fixed blocks of `block` indices regardless of
/// the worker count; each block is summed with a compensated accumulator and
/// block results are combined in ascending block order. The result is
/// therefore bit-identical for any `threads`.
inline real reduce_blocks(std::size_t n, std::size_t block, unsigned threads,
                          const std::function<real(std::size_t, std::size_t)>& block_sum) {
  if (n == 0) return 0;
  if (block == 0) block = 1;
  const std::size_t nblocks = (n + block - 1) / block;
  std::vector<real> partial(nblocks, 0);
  auto run = [&](std::size_t first_block, std::size_t stride) {
    for (std::size_t b = first_block; b < nblocks; b += stride) {
      const std::size_t lo = b * block;
      const std::size_t hi = std::min(n, lo + block);
      partial[b] = block_sum(lo, hi);
    }
  };
  if (threads <= 1 || nblocks == 1) {
    run(0, 1);
  } else {
    const unsigned workers = std::min<std::size_t>(threads, nblocks);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
    for (auto& t : pool) t.join();
  }
  CompensatedSum<real> total;
  for (real v : partial) total += v;
  return total.value();
}

}  // namespace polylat
