#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace srmc::detail {

// Runs body(i) for i in [0, n) on up to hardware_concurrency threads. Each
// index writes only its own output slot, so results do not depend on the
// schedule. The exception from the lowest failing index is rethrown.
template <typename Body>
void parallel_for(std::int64_t n, Body&& body) {
    if (n <= 0) return;
    const auto hw = static_cast<std::int64_t>(std::max(1U, std::thread::hardware_concurrency()));
    const std::int64_t workers = std::min(n, hw);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    if (workers == 1) {
        for (std::int64_t i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::int64_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (std::int64_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::int64_t i = next++; i < n; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[static_cast<std::size_t>(i)] = std::current_exception();
                    }
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace srmc::detail
