#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace spamwatch {

// Runs fn(0..n-1) on up to `workers` threads and returns results in index
// order, so parallel execution never reorders output.
template <typename R, typename Fn>
std::vector<R> parallel_map(std::size_t n, Fn fn, unsigned workers) {
    std::vector<R> results(n);
    if (n == 0) return results;
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            results[i] = fn(i);
        }
    };
    std::vector<std::thread> pool;
    unsigned count = std::min<unsigned>(workers, static_cast<unsigned>(n));
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    return results;
}

}  // namespace spamwatch
