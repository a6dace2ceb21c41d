#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace bbr {

inline unsigned worker_count() {
    if (const char* env = std::getenv("BBR_THREADS")) {
        long v = std::atol(env);
        if (v >= 1) return unsigned(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

// Chunked parallel loop over [0, n).  Callers only ever write to disjoint
// output slots indexed by i, so results are identical regardless of the
// worker count or schedule.
template <class F>
void parallel_for(uint64_t n, F&& f) {
    unsigned workers = worker_count();
    if (workers <= 1 || n < 2048) {
        for (uint64_t i = 0; i < n; ++i) f(i);
        return;
    }
    workers = unsigned(std::min<uint64_t>(workers, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    uint64_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        uint64_t lo = uint64_t(w) * chunk;
        uint64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &f] {
            for (uint64_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace bbr
