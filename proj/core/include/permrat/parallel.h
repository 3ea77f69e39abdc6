#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace permrat {

// Worker count for data-parallel loops.  PERMRAT_THREADS overrides the
// hardware default.  Results must never depend on this value; parallel users
// write to disjoint slots and merge in index order.
inline unsigned worker_count() {
    if (const char* e = std::getenv("PERMRAT_THREADS")) {
        long v = std::strtol(e, nullptr, 10);
        if (v > 0 && v <= 256) return unsigned(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? std::min(hc, 16u) : 1u;
}

// Runs fn(i) for i in [0, n) across workers.  Static block partition, so the
// set of calls (and anything indexed by i) is independent of worker count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         unsigned workers = 0) {
    if (workers == 0) workers = worker_count();
    if (n == 0) return;
    workers = unsigned(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    std::exception_ptr first_error;
    std::mutex error_mu;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = std::size_t(w) * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn, &first_error, &error_mu] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace permrat
