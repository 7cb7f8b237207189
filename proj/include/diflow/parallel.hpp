#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace diflow {

/// Runs fn(t) for t in [0, tasks) on up to `threads` workers (0 = hardware
/// concurrency). Tasks must write to disjoint state; the first exception is
/// rethrown after all workers join.
template <typename Fn>
void parallel_for(int tasks, int threads, Fn&& fn) {
    if (tasks <= 0) return;
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
    }
    threads = std::max(1, std::min(threads, tasks));
    if (threads == 1) {
        for (int t = 0; t < tasks; ++t) fn(t);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            int t = next.fetch_add(1);
            if (t >= tasks) return;
            try {
                fn(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace diflow
