#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace kolmo {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3", SC 2011).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept;

// A counter-based random stream. The key is the master seed and the upper
// half of the counter is the stream id, so stream i of seed s is a pure
// function of (s, i) and never depends on which worker consumes it.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept;

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;

  // Standard exponential.
  double exponential() noexcept;

  // Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t blocks_used() const noexcept { return block_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

// Stream ids are split into a domain tag (top 16 bits) and an index so that
// different experiment phases sharing one seed never reuse a stream.
enum class StreamDomain : std::uint64_t {
  kSampler = 1,
  kReturnMinus = 2,
  kReturnPlus = 3,
  kGeneralStart = 4,
  kCascade = 5,
  kPath = 6,
  kMisc = 7,
};

inline RandomStream make_stream(std::uint64_t seed, StreamDomain domain, std::uint64_t index) {
  return RandomStream(seed, (static_cast<std::uint64_t>(domain) << 48) | (index & ((1ULL << 48) - 1)));
}

}  // namespace kolmo
