#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sphcone {

// Thread count from SPHCONE_THREADS, else hardware concurrency.
inline unsigned thread_count() {
    if (const char* s = std::getenv("SPHCONE_THREADS")) {
        const int n = std::atoi(s);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Static block partition, so results written by index are independent of
// scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t T = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
    if (T <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < T; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t * n / T; i < (t + 1) * n / T; ++i) fn(i);
            } catch (...) {
                std::lock_guard lk(mu);
                if (!err) err = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace sphcone
