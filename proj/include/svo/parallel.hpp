// Minimal deterministic work-sharing loop.
#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace svo::detail {

/**
 * @brief Run body(i) for i in [0, n) on up to `threads` workers.
 *
 * The body must make each iteration independent of scheduling (e.g. write to
 * a slot indexed by i, derive RNG state from i). Under that contract results
 * are identical for any thread count, including threads <= 1 which runs the
 * plain serial loop.
 */
inline void parallel_for(std::int64_t n, int threads,
                         const std::function<void(std::int64_t)>& body) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    const int workers = static_cast<int>(std::min<std::int64_t>(threads, n));
    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error;
    std::once_flag error_flag;

    auto run = [&] {
        for (;;) {
            const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::call_once(error_flag, [&] { first_error = std::current_exception(); });
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

/// Number of worker threads to use when the caller passes 0 ("auto").
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace svo::detail
