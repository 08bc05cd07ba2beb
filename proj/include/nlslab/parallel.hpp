#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace nlslab {

/// Runs fn(i) for i in [0, n) on up to `workers` threads.  Work items must
/// be independent; callers keep determinism by writing to per-index slots.
inline void parallel_for(std::size_t n, int workers,
                         const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int k = static_cast<int>(std::min<std::size_t>(workers, n));
    std::vector<std::thread> pool;
    pool.reserve(k);
    std::exception_ptr err;
    std::mutex err_mutex;
    for (int t = 0; t < k; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += k) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

inline int default_workers() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

} // namespace nlslab
