// parallel.hpp — Minimal deterministic work partitioning over std::thread

#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace colsim {

// Runs fn(i) for i in [0, count). Work is split into contiguous blocks, one
// per worker; results must be written to preallocated slots indexed by i so
// that assembly order never depends on scheduling.
template <typename F>
void parallel_for(std::size_t count, int threads, F&& fn) {
    const int workers = std::max(1, threads);
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t used = std::min<std::size_t>(workers, count);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(used);
    const std::size_t chunk = (count + used - 1) / used;
    for (std::size_t t = 0; t < used; ++t) {
        pool.emplace_back([&, t] {
            try {
                const std::size_t lo = t * chunk;
                const std::size_t hi = std::min(count, lo + chunk);
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace colsim
