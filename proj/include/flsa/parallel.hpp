#ifndef FLSA_PARALLEL_HPP
#define FLSA_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace flsa {

/**
 * Run `fn(i)` for i in [0, count) on at most `jobs` threads (0 or 1 runs inline).
 * The first exception thrown by any task is rethrown after all workers join.
 */
template <class F>
void parallel_for(std::size_t count, unsigned jobs, F&& fn) {
    const std::size_t workers = std::min<std::size_t>(jobs == 0 ? 1 : jobs, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace flsa

#endif
