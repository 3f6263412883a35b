#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace mhdbl {

/// Worker count used by parallel_for (1 means run inline).
inline std::atomic<int>& thread_count() {
    static std::atomic<int> n{1};
    return n;
}

inline void set_thread_count(int n) { thread_count() = std::max(1, n); }

/// Calls fn(i) for i in [begin, end) split into contiguous chunks. Each index
/// is handled by exactly one worker, so results do not depend on the count.
template <class Fn>
void parallel_for(int begin, int end, Fn&& fn) {
    const int n = end - begin;
    const int workers = std::min(thread_count().load(), n);
    if (workers <= 1) {
        for (int i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        const int lo = begin + n * w / workers, hi = begin + n * (w + 1) / workers;
        pool.emplace_back([lo, hi, &fn] {
            for (int i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace mhdbl
