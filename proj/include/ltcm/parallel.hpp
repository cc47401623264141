#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace ltcm {

// Run fn(i) for i in [0, count) on up to `threads` workers and return the
// results in index order. Work is handed out through an atomic counter, so
// the schedule varies but the output does not; if several calls throw, the
// lowest index wins, matching what a sequential run would surface.
template <class T, class F>
std::vector<T> parallel_map(size_t count, long threads, F&& fn) {
    std::vector<T> out(count);
    if (count == 0)
        return out;
    if (threads < 1)
        threads = 1;
    if (static_cast<size_t>(threads) > count)
        threads = static_cast<long>(count);
    if (threads == 1) {
        for (size_t i = 0; i < count; ++i)
            out[i] = fn(i);
        return out;
    }
    std::vector<std::exception_ptr> errs(count);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                out[i] = fn(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (long t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    for (size_t i = 0; i < count; ++i)
        if (errs[i])
            std::rethrow_exception(errs[i]);
    return out;
}

} // namespace ltcm
