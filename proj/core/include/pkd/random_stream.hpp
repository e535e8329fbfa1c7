#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "pkd/bit_string.hpp"

namespace pkd {

/// Independent purposes a session draws randomness for. Each purpose gets its
/// own stream so adding draws to one never perturbs another.
enum class StreamPurpose : std::uint32_t {
  alice_rounds = 1,
  bob_rounds = 2,
  mapping_entropy = 3,
  key_pool = 4,
  fixed_key = 5,
  mac_key = 6,
  public_randomness = 7,
  test = 100,
};

/// Seeded, reproducible generator (64-bit Mersenne Twister).
///
/// The engine state is derived from (master seed, purpose, shard) through
/// std::seed_seq, so the stream for a given triple is identical on every
/// platform and independent of how many workers consume other shards.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, StreamPurpose purpose,
               std::uint64_t shard = 0);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  bool bernoulli(double p) { return uniform() < p; }
  bool bit() { return (engine_() >> 63) != 0; }
  /// `width` (<= 64) uniformly random bits as an integer.
  std::uint64_t bits(unsigned width) {
    return width == 0 ? 0 : engine_() >> (64 - width);
  }
  BitString bit_string(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

/// Contiguous partition of [0, total) into fixed-size shards. The shard size
/// is a constant of the plan, never of the worker count.
struct ShardPlan {
  std::uint64_t total = 0;
  std::uint64_t shard_size = 1U << 16;

  [[nodiscard]] std::uint64_t shard_count() const {
    return total == 0 ? 0 : (total + shard_size - 1) / shard_size;
  }
  [[nodiscard]] std::uint64_t begin(std::uint64_t shard) const {
    return shard * shard_size;
  }
  [[nodiscard]] std::uint64_t end(std::uint64_t shard) const {
    const std::uint64_t e = (shard + 1) * shard_size;
    return e < total ? e : total;
  }
};

/// Runs fn(shard) for every shard on up to `workers` threads (0 = hardware
/// concurrency). fn must only write to per-shard storage.
void for_each_shard(const ShardPlan& plan, unsigned workers,
                    const std::function<void(std::uint64_t)>& fn);

}  // namespace pkd
