#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace stereopipe {

inline int resolve_threads(int threads) {
    if (threads > 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/// Run fn(i) for i in [begin, end) split into contiguous chunks, one per
/// worker. Results must not depend on the split: workers write disjoint
/// outputs and read only state fixed before the call.
template <typename Fn>
void parallel_for(int begin, int end, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    int count = end - begin;
    if (count <= 0) return;
    if (threads <= 1 || count == 1) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }
    int workers = std::min(threads, count);
    int chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        int lo = begin + w * chunk;
        int hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace stereopipe
