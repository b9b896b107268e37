#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <utility>
#include <vector>

namespace negcall {

/// Paths per work unit. The partition is fixed by path count alone, so the
/// fold below visits identical partial results in identical order no matter
/// how many threads ran or how they were scheduled.
inline constexpr std::size_t kChunkPaths = 1024;

/// Runs `work(acc, path_id)` for path_id in [0, n_paths), accumulating into
/// per-chunk copies of `proto` and folding them back in chunk order via
/// Acc::merge. Results are bit-identical for any thread count. `threads = 0`
/// means hardware concurrency.
template <class Acc, class Work>
Acc run_chunked(std::size_t n_paths, unsigned threads, const Acc& proto, Work work) {
    const std::size_t n_chunks = n_paths == 0 ? 0 : (n_paths + kChunkPaths - 1) / kChunkPaths;
    std::vector<Acc> parts(n_chunks, proto);

    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) {
            const std::size_t lo = c * kChunkPaths;
            const std::size_t hi = std::min(n_paths, lo + kChunkPaths);
            for (std::size_t p = lo; p < hi; ++p) work(parts[c], p);
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1 || n_chunks <= 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        const unsigned n_workers = static_cast<unsigned>(
            std::min<std::size_t>(threads, n_chunks));
        pool.reserve(n_workers);
        for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(drain);
        for (std::thread& th : pool) th.join();
    }

    Acc total(proto);
    for (Acc& part : parts) total.merge(part);
    return total;
}

}  // namespace negcall
