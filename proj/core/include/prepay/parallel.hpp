#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace prepay {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Number of worker threads used by block-parallel loops. Defaults to the
// PREPAY_THREADS environment variable, else hardware concurrency.
std::size_t thread_count();
void set_thread_count(std::size_t n);  // 0 restores the default

// Paths are processed in fixed-size blocks so that results never depend on
// how many threads run them.
inline constexpr std::size_t kPathBlockSize = 1024;

// Calls fn(block_index) for every block in [0, n_blocks), spread over
// thread_count() threads. Exceptions from workers are rethrown (first one wins).
void parallel_for_blocks(std::size_t n_blocks, const std::function<void(std::size_t)>& fn);

// Seed for an independent random stream per (seed, block) pair.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t block);

}  // namespace prepay
