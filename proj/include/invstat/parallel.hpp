#pragma once

// Deterministic trial-level parallelism: workers fill disjoint index
// ranges of a preallocated result vector, so the aggregate never depends
// on thread count or scheduling.

#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace invstat {

inline unsigned resolve_thread_count(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Run body(trial) for trial = 0..count-1 on `threads` workers.
template <class Body>
void parallel_trials(std::size_t count, unsigned threads, const Body& body) {
    threads = resolve_thread_count(threads);
    if (threads <= 1 || count < 2) {
        for (std::size_t t = 0; t < count; ++t) body(t);
        return;
    }
    if (threads > count) threads = static_cast<unsigned>(count);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t lo = count * w / threads;
        const std::size_t hi = count * (w + 1) / threads;
        pool.emplace_back([&, lo, hi]() {
            try {
                for (std::size_t t = lo; t < hi; ++t) body(t);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace invstat
