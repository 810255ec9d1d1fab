#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "kolmo/rng.hpp"

namespace kolmo {
namespace {

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswerZero) {
  const PhiloxCounter out = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
  const PhiloxCounter out = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const PhiloxCounter out =
      philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RandomStream, ReproducibleFromSeedAndId) {
  RandomStream a(42, 7);
  RandomStream b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, StreamsDiffer) {
  std::set<std::uint64_t> first;
  for (std::uint64_t id = 0; id < 100; ++id) first.insert(RandomStream(1, id).next_u64());
  for (std::uint64_t seed = 2; seed < 100; ++seed) first.insert(RandomStream(seed, 0).next_u64());
  EXPECT_EQ(first.size(), 198u);
}

TEST(RandomStream, DomainsSeparate) {
  RandomStream a = make_stream(5, StreamDomain::kReturnMinus, 3);
  RandomStream b = make_stream(5, StreamDomain::kReturnPlus, 3);
  EXPECT_NE(a.stream_id(), b.stream_id());
  EXPECT_NE(a.next_u64(), b.next_u64());
}

TEST(RandomStream, UniformOpenInterval) {
  RandomStream r(3, 0);
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Mean 1/2, sd of the mean sqrt(1/12/n).
  EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12.0 / n));
}

TEST(RandomStream, ExponentialMean) {
  RandomStream r(4, 0);
  double sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += r.exponential();
  EXPECT_NEAR(sum / n, 1.0, 4.0 / std::sqrt(n));
}

TEST(RandomStream, BelowStaysInRangeAndCoversIt) {
  RandomStream r(9, 1);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = r.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(RandomStream, CountsBlocks) {
  RandomStream r(1, 1);
  EXPECT_EQ(r.blocks_used(), 0u);
  r.next_u64();
  r.next_u64();
  EXPECT_EQ(r.blocks_used(), 1u);
  r.next_u64();
  EXPECT_EQ(r.blocks_used(), 2u);
}

}  // namespace
}  // namespace kolmo
