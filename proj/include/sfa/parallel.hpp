#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace sfa {

// Runs body(i) for i in [0, n) on up to `threads` workers. Results must be written
// by index, which keeps the outcome independent of scheduling.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
    std::size_t nt = std::clamp<std::size_t>(threads > 0 ? threads : 1, 1, n ? n : 1);
    if (nt == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errs(nt);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nt; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i; (i = next++) < n;) body(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace sfa
