#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace kagents::bench::detail {

// Runs body(0..n-1) on up to `workers` threads. Callers write results by index, so the
// aggregate does not depend on scheduling.
template <class F>
void parallel_for(int n, int workers, F&& body) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) body(i);
        });
    for (auto& t : pool) t.join();
}

} // namespace kagents::bench::detail
