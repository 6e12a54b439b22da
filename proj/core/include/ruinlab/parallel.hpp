// SPDX-License-Identifier: Apache-2.0

#ifndef RUINLAB_PARALLEL_HPP
#define RUINLAB_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ruinlab {

/// Resolve a worker-count request (0 means "use the hardware").
inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run `body(rep, acc)` for rep = 0..n-1 across `workers` threads and fold the
/// partial accumulators deterministically.
///
/// Replications are grouped into fixed-size chunks; each chunk is processed
/// sequentially by exactly one worker into its own accumulator slot, and the
/// slots are merged in chunk order on the calling thread. The merged result is
/// therefore bit-identical for any worker count and any scheduling order.
/// `Acc` needs a default constructor and `void merge(const Acc&)`.
template <class Acc, class Body>
Acc run_replications(std::int64_t n, int workers, Body&& body) {
    constexpr std::int64_t kChunk = 1024;
    if (n <= 0) return Acc{};

    const std::int64_t n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<Acc> partials(static_cast<size_t>(n_chunks));
    std::atomic<std::int64_t> next_chunk{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto work = [&]() {
        for (;;) {
            const std::int64_t chunk = next_chunk.fetch_add(1);
            if (chunk >= n_chunks || failed.load(std::memory_order_relaxed)) return;
            Acc acc;
            const std::int64_t begin = chunk * kChunk;
            const std::int64_t end = std::min(n, begin + kChunk);
            try {
                for (std::int64_t rep = begin; rep < end; ++rep) body(rep, acc);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
            partials[static_cast<size_t>(chunk)] = std::move(acc);
        }
    };

    const int nw = static_cast<int>(std::max<std::int64_t>(
        1, std::min<std::int64_t>(resolve_workers(workers), n_chunks)));
    if (nw == 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<size_t>(nw));
        for (int i = 0; i < nw; ++i) threads.emplace_back(work);
        for (auto& t : threads) t.join();
    }
    if (error) std::rethrow_exception(error);

    Acc total;
    for (const Acc& p : partials) total.merge(p);
    return total;
}

} // namespace ruinlab

#endif
