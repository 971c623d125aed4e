#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace lndf {

/// Number of worker threads used by parallel loops. 0 = hardware concurrency.
/// Affects wall time only; every parallel loop in the toolkit writes to
/// disjoint output slots, so results are independent of the worker count.
inline int& worker_count() {
    static int n = 0;
    return n;
}

inline int effective_workers() {
    int n = worker_count();
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return n > 0 ? n : 1;
}

/// Runs fn(i) for i in [0, n) split into contiguous chunks across workers.
inline void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
    int workers = effective_workers();
    if (workers <= 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace lndf
