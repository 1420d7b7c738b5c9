#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"

namespace qdotsim {

/// Thread count from an explicit request, else QDOTSIM_THREADS, else hardware concurrency.
inline int resolve_thread_count(std::optional<int> requested) {
    if (requested) {
        if (*requested < 1) throw ValidationError("must be >= 1", "threads");
        return *requested;
    }
    if (const char* env = std::getenv("QDOTSIM_THREADS"); env && *env) {
        try {
            std::size_t used = 0;
            const int n = std::stoi(env, &used);
            if (used == std::string(env).size() && n >= 1) return n;
        } catch (const std::exception&) {
        }
        throw ValidationError(std::string("not a positive integer: '") + env + "'", "QDOTSIM_THREADS");
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work is claimed
/// index by index, so results must be written to per-index slots. The first
/// exception is rethrown after all workers join.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace qdotsim
