#include "gtr/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace gtr {

int effective_threads() {
    if (const char* env = std::getenv("GTR_THREADS")) {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && value >= 1) {
            return static_cast<int>(value);
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void for_each_chunk(std::uint64_t n_items, std::uint64_t chunk_size,
                    const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn) {
    if (chunk_size == 0) {
        throw std::invalid_argument("chunk_size must be >= 1");
    }
    if (n_items == 0) return;
    const std::uint64_t n_chunks = (n_items + chunk_size - 1) / chunk_size;

    const auto run_chunk = [&](std::uint64_t c) {
        const std::uint64_t begin = c * chunk_size;
        const std::uint64_t end = std::min(n_items, begin + chunk_size);
        fn(c, begin, end);
    };

    const std::uint64_t workers =
        std::min<std::uint64_t>(static_cast<std::uint64_t>(effective_threads()), n_chunks);
    if (workers <= 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) run_chunk(c);
        return;
    }

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                run_chunk(c);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::uint64_t i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace gtr
