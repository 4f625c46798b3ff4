#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace vfiqa {

// 0 means auto: VFIQA_THREADS if set, else hardware concurrency.
inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("VFIQA_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace detail {

// Static row partitioning with one thread per contiguous chunk. Workers write
// disjoint output rows, so the result does not depend on the thread count.
template <typename Fn>
void parallel_for_rows(int rows, int threads, Fn&& fn) {
    threads = resolve_thread_count(threads);
    if (threads > rows) threads = rows;
    if (threads <= 1) {
        for (int r = 0; r < rows; ++r) fn(r);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        const int begin = static_cast<int>(static_cast<int64_t>(rows) * t / threads);
        const int end = static_cast<int>(static_cast<int64_t>(rows) * (t + 1) / threads);
        pool.emplace_back([begin, end, &fn] {
            for (int r = begin; r < end; ++r) fn(r);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail
}  // namespace vfiqa
