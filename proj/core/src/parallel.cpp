#include "prepay/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace prepay {

namespace {

std::atomic<std::size_t> g_threads{0};

std::size_t default_threads() {
    if (const char* env = std::getenv("PREPAY_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::size_t thread_count() {
    const std::size_t n = g_threads.load();
    return n == 0 ? default_threads() : n;
}

void set_thread_count(std::size_t n) { g_threads.store(n); }

void parallel_for_blocks(std::size_t n_blocks, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min(thread_count(), n_blocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            try {
                fn(b);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n_blocks);
                return;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    pool.clear();  // joins
    if (error) std::rethrow_exception(error);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t block) {
    return mix(mix(seed) ^ mix(block + 0x632be59bd9b4e019ULL));
}

}  // namespace prepay
