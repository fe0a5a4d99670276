#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace swept::detail {

/// Splits [0, n) into `chunks` contiguous ranges and runs fn(chunk, begin, end)
/// on up to `threads` workers. Chunk boundaries depend only on n and chunks,
/// so per-chunk outputs concatenated in chunk order are thread-count invariant.
template <typename F>
void parallel_chunks(size_t n, size_t chunks, unsigned threads, F &&fn) {
    chunks = std::max<size_t>(1, std::min(chunks, n));
    auto range = [&](size_t c) { return std::pair{n * c / chunks, n * (c + 1) / chunks}; };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks)));
    if (threads == 1 || n == 0) {
        for (size_t c = 0; c < chunks; ++c) {
            const auto [b, e] = range(c);
            fn(c, b, e);
        }
        return;
    }
    std::mutex mu;
    size_t next = 0;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            while (true) {
                size_t c;
                {
                    std::lock_guard lock(mu);
                    if (next >= chunks || error) return;
                    c = next++;
                }
                try {
                    const auto [b, e] = range(c);
                    fn(c, b, e);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto &th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

/// Thread count from an explicit request, else SWEPT_THREADS, else hardware.
inline unsigned resolve_threads(int requested) {
    if (requested > 0) return static_cast<unsigned>(requested);
    if (const char *env = std::getenv("SWEPT_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception &) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace swept::detail
