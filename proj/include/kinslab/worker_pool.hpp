#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace kinslab {

/// Calls job(k) for k in [0, count) on up to `workers` threads. Jobs write to
/// their own slot, so results merge in index order whatever the scheduling.
/// The first exception (lowest index) is rethrown after all threads join.
template <typename Job>
void run_indexed(std::size_t count, unsigned workers, Job&& job) {
    const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < count; k = next++) {
            try {
                job(k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// std::thread::hardware_concurrency with a floor of one.
inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace kinslab
