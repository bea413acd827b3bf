#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

namespace emrsim {

/// Runs `produce(lo, hi)` over consecutive index blocks on `workers` threads
/// and feeds the results to `consume` in block order on the calling thread.
///
/// Each block is a pure function of its index range, so the consumed sequence
/// is identical for any worker count. The reorder window is bounded: a worker
/// that runs too far ahead of the consumer blocks until the gap closes, which
/// caps in-flight memory independently of the total item count.
template <typename Result, typename Produce, typename Consume>
void ordered_blocks(std::uint64_t n_items, std::uint64_t block_size,
                    unsigned workers, Produce&& produce, Consume&& consume) {
    if (block_size == 0) block_size = 1;
    const std::uint64_t n_blocks = (n_items + block_size - 1) / block_size;

    if (workers <= 1 || n_blocks <= 1) {
        for (std::uint64_t b = 0; b < n_blocks; ++b) {
            const std::uint64_t lo = b * block_size;
            const std::uint64_t hi = std::min(n_items, lo + block_size);
            Result r = produce(lo, hi);
            consume(r);
        }
        return;
    }

    std::mutex mu;
    std::condition_variable ready_cv;   // consumer waits for the next block
    std::condition_variable window_cv;  // producers wait for window space
    std::map<std::uint64_t, Result> done;
    std::uint64_t next_to_consume = 0;
    std::atomic<std::uint64_t> next_to_produce{0};
    std::exception_ptr failure;
    const std::uint64_t window = 2 * static_cast<std::uint64_t>(workers) + 4;

    auto worker_fn = [&]() {
        for (;;) {
            const std::uint64_t b = next_to_produce.fetch_add(1);
            if (b >= n_blocks) return;
            {
                std::unique_lock<std::mutex> lock(mu);
                window_cv.wait(lock, [&] {
                    return failure || b < next_to_consume + window;
                });
                if (failure) return;
            }
            const std::uint64_t lo = b * block_size;
            const std::uint64_t hi = std::min(n_items, lo + block_size);
            try {
                Result r = produce(lo, hi);
                std::lock_guard<std::mutex> lock(mu);
                done.emplace(b, std::move(r));
                if (b == next_to_consume) ready_cv.notify_one();
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) failure = std::current_exception();
                ready_cv.notify_one();
                window_cv.notify_all();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker_fn);

    try {
        while (next_to_consume < n_blocks) {
            Result r;
            {
                std::unique_lock<std::mutex> lock(mu);
                ready_cv.wait(lock, [&] {
                    return failure || done.count(next_to_consume) > 0;
                });
                if (failure) break;
                auto it = done.find(next_to_consume);
                r = std::move(it->second);
                done.erase(it);
                ++next_to_consume;
                window_cv.notify_all();
            }
            consume(r);
        }
    } catch (...) {
        {
            std::lock_guard<std::mutex> lock(mu);
            if (!failure) failure = std::current_exception();
            window_cv.notify_all();
        }
        // Unblock producers and drain before rethrowing.
        next_to_produce.store(n_blocks);
    }

    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace emrsim
