#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace morphseg {

/// Worker count: MORPHSEG_THREADS when set to a positive integer, otherwise
/// the available hardware parallelism.
inline std::size_t worker_count()
{
    if (const char* env = std::getenv("MORPHSEG_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Work items are
/// claimed dynamically; callers write results into per-index slots so that
/// the outcome does not depend on scheduling. The first exception thrown by
/// any item is rethrown after all workers have joined.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t workers = worker_count())
{
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace morphseg
