#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace qal {

// Worker count: hardware concurrency capped by QAL_THREADS
inline int worker_count() {
    int hw = int(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("QAL_THREADS")) {
        try {
            int cap = std::stoi(env);
            if (cap >= 1) hw = std::min(hw, cap);
        } catch (...) {
        }
    }
    return hw;
}

// Runs body(i) for i in [0, n) on a pool; each index is visited once
template <class F>
void parallel_for(std::size_t n, F body, int workers = 0) {
    if (workers <= 0) workers = worker_count();
    workers = int(std::min<std::size_t>(std::size_t(workers), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace qal
