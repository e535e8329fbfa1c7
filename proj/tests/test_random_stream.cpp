#include <atomic>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pkd/random_stream.hpp"

using namespace pkd;

TEST_CASE("streams are reproducible and separated by purpose and shard") {
  RandomStream a(42, StreamPurpose::alice_rounds), b(42, StreamPurpose::alice_rounds);
  RandomStream c(42, StreamPurpose::bob_rounds), d(42, StreamPurpose::alice_rounds, 1);
  RandomStream e(43, StreamPurpose::alice_rounds);
  std::vector<std::uint64_t> va, vb, vc, vd, ve;
  for (int i = 0; i < 16; ++i) {
    va.push_back(a.next_u64());
    vb.push_back(b.next_u64());
    vc.push_back(c.next_u64());
    vd.push_back(d.next_u64());
    ve.push_back(e.next_u64());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
  CHECK(va != ve);
}

TEST_CASE("high-bit seeds are not truncated") {
  RandomStream a(1, StreamPurpose::test), b((std::uint64_t{1} << 32) | 1, StreamPurpose::test);
  CHECK(a.next_u64() != b.next_u64());
}

TEST_CASE("uniform and bit helpers stay in range") {
  RandomStream r(7, StreamPurpose::test);
  double sum = 0.0;
  int ones = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    ones += r.bit() ? 1 : 0;
    REQUIRE(r.bits(10) < 1024U);
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
  CHECK(ones / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
  CHECK(r.bits(0) == 0U);
  const BitString s = r.bit_string(77);
  CHECK(s.size() == 77);
}

TEST_CASE("shard plan covers the range exactly") {
  const ShardPlan p{200000, 65536};
  CHECK(p.shard_count() == 4);
  CHECK(p.begin(3) == 196608);
  CHECK(p.end(3) == 200000);
  CHECK(ShardPlan{0}.shard_count() == 0);
  CHECK(ShardPlan{65536}.shard_count() == 1);
}

TEST_CASE("for_each_shard visits each shard once for any worker count") {
  const ShardPlan p{1000, 7};
  for (unsigned w : {0U, 1U, 2U, 5U, 64U}) {
    std::vector<std::atomic<int>> hits(p.shard_count());
    for_each_shard(p, w, [&](std::uint64_t s) { ++hits[s]; });
    for (auto& h : hits) REQUIRE(h.load() == 1);
  }
}

TEST_CASE("for_each_shard output is independent of worker count") {
  const ShardPlan p{50000, 1000};
  auto run = [&](unsigned w) {
    std::vector<std::uint64_t> out(p.shard_count());
    for_each_shard(p, w, [&](std::uint64_t s) {
      RandomStream r(9, StreamPurpose::test, s);
      std::uint64_t acc = 0;
      for (auto i = p.begin(s); i < p.end(s); ++i) acc ^= r.next_u64();
      out[s] = acc;
    });
    return out;
  };
  const auto one = run(1);
  CHECK(run(3) == one);
  CHECK(run(8) == one);
}

TEST_CASE("exceptions from workers propagate") {
  const ShardPlan p{100, 10};
  for (unsigned w : {1U, 4U}) {
    CHECK_THROWS_AS(for_each_shard(p, w,
                                   [](std::uint64_t s) {
                                     if (s == 5) throw std::runtime_error("boom");
                                   }),
                    std::runtime_error);
  }
}
