#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

#include "twistlab/defs.hpp"

namespace twistlab {

// Neumaier's variant of Kahan summation. Unlike plain Kahan it also keeps the
// correction when the incoming term is larger than the running sum, so long
// alternating-sign accumulations stay near 1 ulp of the exact result.
struct NeumaierSum {
  double hi = 0.0;
  double lo = 0.0;

  void add(double x) {
    double t = hi + x;
    if (std::abs(hi) >= std::abs(x))
      lo += (hi - t) + x;
    else
      lo += (x - t) + hi;
    hi = t;
  }

  double value() const { return hi + lo; }
};

struct NeumaierCplx {
  NeumaierSum re, im;

  void add(const cplx& z) {
    re.add(z.real());
    im.add(z.imag());
  }
  void add(double x) { re.add(x); }

  cplx value() const { return {re.value(), im.value()}; }
};

// Deterministic block reduction. The index range [0, n) is cut into fixed
// blocks; workers pull block indices from an atomic counter, store each
// block's partial into a slot keyed by block index, and the partials are
// folded serially in block order afterwards. Scheduling therefore cannot
// change the rounding: the result is bit-identical for every thread count,
// including 1 (the serial path runs the exact same per-block fold).
//
// block_fn(lo, hi) must return the partial sum over indices [lo, hi).
template <class BlockFn>
cplx parallel_reduce_blocks(std::size_t n, std::size_t block_size,
                            unsigned threads, BlockFn&& block_fn) {
  if (n == 0) return {0.0, 0.0};
  if (block_size == 0) block_size = 1;
  const std::size_t nblocks = (n + block_size - 1) / block_size;
  std::vector<cplx> partial(nblocks, cplx{0.0, 0.0});

  auto run_block = [&](std::size_t b) {
    const std::size_t lo = b * block_size;
    const std::size_t hi = std::min(n, lo + block_size);
    partial[b] = block_fn(lo, hi);
  };

  if (threads <= 1 || nblocks == 1) {
    for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
        if (b >= nblocks) return;
        run_block(b);
      }
    };
    const unsigned nt = std::min<std::size_t>(threads, nblocks);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  NeumaierCplx total;
  for (const cplx& p : partial) total.add(p);
  return total.value();
}

} // namespace twistlab
