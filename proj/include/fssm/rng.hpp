#pragma once

#include <array>
#include <cstdint>

namespace fssm {

// Counter-based stream: Philox4x64-10. A stream is identified by
// (seed, stream_id); draws within a stream consume the 256-bit counter
// sequentially. Distinct stream ids give statistically independent streams
// under the same seed, so chain i runs on stream i with no coordination.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : key_{seed, stream_id}, ctr_{0, 0, 0, 0}, buf_pos_(4) {}

  // Next raw 64-bit word.
  std::uint64_t next_u64() {
    if (buf_pos_ == 4) {
      buf_ = block(ctr_, key_);
      increment_counter();
      buf_pos_ = 0;
    }
    return buf_[buf_pos_++];
  }

  // Uniform on (0, 1): 53-bit mantissa, zero rejected so logs are safe.
  double uniform() {
    for (;;) {
      double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream_id() const { return key_[1]; }

  // One keyed block of four words; exposed for reference-vector tests.
  static std::array<std::uint64_t, 4> block(const std::array<std::uint64_t, 4>& counter,
                                            const std::array<std::uint64_t, 2>& key);

 private:
  void increment_counter() {
    for (int i = 0; i < 4; ++i) {
      if (++ctr_[i] != 0) break;
    }
  }

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> ctr_;
  std::array<std::uint64_t, 4> buf_;
  int buf_pos_;
};

}  // namespace fssm
