#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace ricci_forge {

/// Worker count: RICCI_FORGE_THREADS if set and positive, else the hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("RICCI_FORGE_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

/// Calls fn(begin, end) on contiguous chunks of [0, n). Chunk boundaries depend
/// only on n and the worker count, and callers write into per-index slots, so
/// results do not depend on scheduling.
template <class Fn>
void parallel_chunks(std::size_t n, Fn&& fn, std::size_t min_chunk = 256) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(1, n / min_chunk));
    if (workers <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t lo = n * w / workers;
            const std::size_t hi = n * (w + 1) / workers;
            pool.emplace_back([&fn, &errors, w, lo, hi] {
                try {
                    fn(lo, hi);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace ricci_forge
