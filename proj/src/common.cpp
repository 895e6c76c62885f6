#include "levywave/common.hpp"

#include <atomic>
#include <cstdlib>

namespace levywave {

unsigned worker_count() {
    if (const char* env = std::getenv("LEVYWAVE_WORKERS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned workers = worker_count();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace levywave
