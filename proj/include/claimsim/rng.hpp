#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace claimsim {

// Philox4x64-10 block function (Salmon et al., SC'11).
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

/// Counter-based random stream keyed by (master_seed, stream_index).
///
/// The pair fully determines the produced sequence; streams with distinct
/// indices use disjoint counter ranges of the same keyed permutation, so they
/// can be consumed concurrently without coordination. A single stream object
/// is not thread-safe. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : seed_(master_seed), stream_(stream_index) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    if (pos_ == 4) refill();
    return buffer_[pos_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1); safe to pass to log().
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_; }

 private:
  void refill() {
    buffer_ = philox4x64({block_, stream_, 0, 0}, {seed_, 0});
    ++block_;
    pos_ = 0;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buffer_{};
  int pos_ = 4;
};

/// Packs a purpose tag, a sub-index (e.g. horizon) and a replication index
/// into one stream index. Purposes occupy the top 8 bits, sub-indices the next
/// 16, replications the low 40.
constexpr std::uint64_t stream_id(std::uint64_t purpose, std::uint64_t sub,
                                  std::uint64_t replication) {
  return (purpose << 56) | ((sub & 0xFFFFu) << 40) |
         (replication & ((std::uint64_t{1} << 40) - 1));
}

}  // namespace claimsim
