#pragma once

// Block-parallel loop over an index range.  Results must be written to
// caller-owned per-index slots so that the output is identical for any thread
// count; reductions over those slots happen sequentially afterwards.

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace hypbool {

inline int thread_count() {
    if (const char* env = std::getenv("HYPBOOL_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : int(hc);
}

template <class F>
void parallel_for(long n, F&& body) {
    if (n <= 0) return;
    int workers = std::min<long>(thread_count(), n);
    if (workers <= 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error = nullptr;
    std::mutex err_mutex;
    for (int w = 0; w < workers; ++w) {
        long lo = n * w / workers, hi = n * (w + 1) / workers;
        pool.emplace_back([&, lo, hi]() {
            try {
                for (long i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Pairwise summation; the reduction tree depends only on the element order.
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return v.empty() ? 0.0 : pairwise_sum(v, 0, v.size());
}

}  // namespace hypbool
