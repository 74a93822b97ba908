#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace prunetx {

// Worker count: PRUNETX_THREADS environment variable, else hardware threads.
inline int thread_count() {
    if (const char* env = std::getenv("PRUNETX_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return std::min(n, 64);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

// Splits [begin, end) into contiguous slices, one worker per slice. Workers
// must write disjoint outputs; the split is deterministic, the execution
// order is not.
template <typename Fn>
void parallel_for_ranges(std::uint64_t begin, std::uint64_t end, Fn&& fn, int threads = 0) {
    if (threads <= 0) threads = thread_count();
    const std::uint64_t total = end > begin ? end - begin : 0;
    if (total == 0) return;
    const std::uint64_t n_slices = std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), total);
    if (n_slices <= 1) {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_slices);
    const std::uint64_t step = total / n_slices;
    std::uint64_t lo = begin;
    for (std::uint64_t s = 0; s < n_slices; ++s) {
        const std::uint64_t hi = (s + 1 == n_slices) ? end : lo + step;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
        lo = hi;
    }
    for (auto& t : pool) t.join();
}

}  // namespace prunetx
