#include "pkd/random_stream.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pkd {

RandomStream::RandomStream(std::uint64_t master_seed, StreamPurpose purpose,
                           std::uint64_t shard) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(purpose),
                    static_cast<std::uint32_t>(shard),
                    static_cast<std::uint32_t>(shard >> 32)};
  engine_.seed(seq);
}

BitString RandomStream::bit_string(std::size_t n) {
  BitString out(n);
  for (auto& w : out.words()) w = engine_();
  out.resize(n);
  return out;
}

void for_each_shard(const ShardPlan& plan, unsigned workers,
                    const std::function<void(std::uint64_t)>& fn) {
  const std::uint64_t shards = plan.shard_count();
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::uint64_t>(workers, std::max<std::uint64_t>(shards, 1)));
  if (workers <= 1) {
    for (std::uint64_t s = 0; s < shards; ++s) fn(s);
    return;
  }

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t s = next++; s < shards; s = next++) {
          try {
            fn(s);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pkd
