#pragma once
// Counter-based random streams for reproducible parallel Monte Carlo.
//
// Every trial owns keyed streams derived from (master_seed, sweep_index,
// trial_index, lane). A stream replays the same sequence for the same key
// no matter how trials are scheduled over workers, which is what makes
// experiment output independent of the worker count.

#include <array>
#include <cstdint>

namespace fptrack {

// Philox4x32-10 block cipher (Salmon et al., "Parallel random numbers:
// as easy as 1, 2, 3", SC'11). 128-bit counter, 64-bit key.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter encrypt(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }
};

// Lane ids keep substreams of one trial disjoint.
inline constexpr std::uint32_t kLaneWalk = 0;   // V (walk increments)
inline constexpr std::uint32_t kLaneNoise = 1;  // W (observation noise)

struct StreamKey {
  std::uint64_t master_seed = 0;
  std::uint32_t sweep_index = 0;   // < 2^24
  std::uint64_t trial_index = 0;
  std::uint32_t lane = 0;          // < 2^8
};

// Tables for the Marsaglia-Tsang ziggurat (128 layers).
struct ZigguratTables {
  std::uint32_t kn[128];
  double wn[128];
  double fn[128];
};
extern const ZigguratTables kZiggurat;

class RandomStream {
 public:
  explicit RandomStream(const StreamKey& k) noexcept
      : key_{static_cast<std::uint32_t>(k.master_seed),
             static_cast<std::uint32_t>(k.master_seed >> 32)},
        ctr_{0u, static_cast<std::uint32_t>(k.trial_index),
             static_cast<std::uint32_t>(k.trial_index >> 32),
             (k.sweep_index << 8) | (k.lane & 0xFFu)} {}

  std::uint32_t next_u32() noexcept {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  // [0, 1), 53-bit resolution
  double uniform01() noexcept { return double(next_u64() >> 11) * 0x1.0p-53; }

  // (0, 1), safe for log()
  double uniform_open() noexcept {
    return (double(next_u32()) + 0.5) * 0x1.0p-32;
  }

  // Standard normal draw, exact-distribution ziggurat rejection sampler.
  double normal() noexcept {
    const std::uint32_t u = next_u32();
    const std::int32_t hz = static_cast<std::int32_t>(u);
    const std::uint32_t iz = u & 127u;
    const std::uint32_t mag = hz >= 0 ? u : 0u - u;
    if (mag < kZiggurat.kn[iz]) return double(hz) * kZiggurat.wn[iz];
    return normal_slow(hz, iz);
  }

 private:
  void refill() noexcept {
    buf_ = Philox4x32::encrypt(ctr_, key_);
    ++ctr_[0];
    pos_ = 0;
  }

  double normal_slow(std::int32_t hz, std::uint32_t iz) noexcept;

  Philox4x32::Key key_;
  Philox4x32::Counter ctr_;
  Philox4x32::Counter buf_{};
  unsigned pos_ = 4;
};

}  // namespace fptrack
