#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace geoflow {

/// Thread budget for bulk sampling. Results never depend on it: work is cut
/// into fixed-size blocks and each block owns its random stream.
struct Parallelism {
    unsigned threads = 1;
};

inline constexpr std::size_t kBlockSize = 4096;

/// Engine for block `block` of stream `stream` under `seed`.
inline std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(block),
                      static_cast<std::uint32_t>(block >> 32)};
    return std::mt19937_64(seq);
}

/// Calls fn(block, begin, end) for consecutive blocks of [0, count).
/// Exceptions thrown by fn are rethrown on the calling thread.
template <class Fn>
void for_each_block(std::size_t count, Parallelism par, Fn&& fn) {
    const std::size_t blocks = (count + kBlockSize - 1) / kBlockSize;
    if (blocks == 0) return;
    const unsigned nthreads = std::max(1u, std::min<unsigned>(par.threads, static_cast<unsigned>(blocks)));
    auto run_block = [&](std::size_t b) { fn(b, b * kBlockSize, std::min(count, (b + 1) * kBlockSize)); };
    if (nthreads == 1) {
        for (std::size_t b = 0; b < blocks; ++b) run_block(b);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned w = 0; w < nthreads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t b = w; b < blocks; b += nthreads) {
                try {
                    run_block(b);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

/// Calls fn(i) for every i in [0, count), strided over the thread budget.
/// Intended for small counts of expensive, independent items.
template <class Fn>
void for_each_index(std::size_t count, Parallelism par, Fn&& fn) {
    const unsigned nthreads = std::max(1u, std::min<unsigned>(par.threads, static_cast<unsigned>(count)));
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nthreads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += nthreads) fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace geoflow
