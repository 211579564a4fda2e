#pragma once

#include <future>
#include <thread>
#include <vector>

namespace orbispec {

inline unsigned default_thread_count() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// Splits [0, n) into contiguous chunks, runs `work(begin, end)` on each, and
// returns the per-chunk results in chunk order. Workers never share state, so
// the merged result is identical to a serial run regardless of thread count.
template <class R, class Work>
std::vector<R> parallel_chunks(std::size_t n, unsigned threads, Work&& work) {
    std::vector<R> results;
    if (n == 0) return results;
    unsigned t = threads == 0 ? 1 : threads;
    if (t > n) t = static_cast<unsigned>(n);
    if (t == 1) {
        results.push_back(work(std::size_t(0), n));
        return results;
    }
    std::vector<std::future<R>> futs;
    futs.reserve(t);
    std::size_t chunk = (n + t - 1) / t;
    for (unsigned i = 0; i < t; ++i) {
        std::size_t b = std::size_t(i) * chunk;
        std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        futs.push_back(std::async(std::launch::async,
                                  [b, e, &work]() { return work(b, e); }));
    }
    results.reserve(futs.size());
    for (auto& f : futs) results.push_back(f.get());
    return results;
}

} // namespace orbispec
