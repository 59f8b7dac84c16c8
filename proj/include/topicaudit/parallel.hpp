#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace topicaudit {

// Worker count: explicit value > 0 wins, then TOPICAUDIT_THREADS, then 1.
// The default is deliberately serial; parallel reductions merge per-slice
// partials in slice order, so results are stable for a fixed thread count.
inline std::size_t resolve_threads(std::size_t requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("TOPICAUDIT_THREADS")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return 1;
}

// Splits [0, n) into at most `threads` contiguous slices and runs
// fn(begin, end, slice_index) on each. Slice boundaries depend only on
// (n, threads). Runs inline when a single slice suffices.
inline void parallel_slices(std::size_t n, std::size_t threads,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        fn(0, n, 0);
        return;
    }
    const std::size_t slices = std::min(threads, n);
    const std::size_t base = n / slices;
    const std::size_t rem = n % slices;
    std::vector<std::thread> pool;
    pool.reserve(slices);
    std::size_t begin = 0;
    for (std::size_t s = 0; s < slices; ++s) {
        std::size_t len = base + (s < rem ? 1 : 0);
        std::size_t end = begin + len;
        pool.emplace_back([=, &fn] { fn(begin, end, s); });
        begin = end;
    }
    for (auto& t : pool) t.join();
}

inline std::size_t slice_count(std::size_t n, std::size_t threads) {
    if (n == 0) return 0;
    if (threads <= 1 || n == 1) return 1;
    return std::min(threads, n);
}

}  // namespace topicaudit
