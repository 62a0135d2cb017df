#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ising {

// Runs fn(i) for i in [0, count). Each index owns its output slot and RNG
// substream, so results do not depend on the worker count or schedule.
// workers == 0 picks the hardware concurrency.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    workers = unsigned(std::min<std::size_t>(workers, count));
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count || failed.load(std::memory_order_relaxed)) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace ising
