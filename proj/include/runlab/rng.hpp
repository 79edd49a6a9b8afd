#pragma once

#include "runlab/numeric.hpp"

#include <array>
#include <cstdint>

namespace runlab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter c, Key k) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k[0] += 0x9E3779B9U;
        k[1] += 0xBB67AE85U;
      }
      std::uint64_t p0 = std::uint64_t{0xD2511F53U} * c[0];
      std::uint64_t p1 = std::uint64_t{0xCD9E8D57U} * c[2];
      c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
    return c;
  }

  explicit Philox4x32(std::uint64_t key)
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  /// 64 random bits; block j of the stream is block({j_lo, j_hi, 0, 0}, key).
  std::uint64_t next64() {
    if (have_ == 0) {
      buf_ = block({static_cast<std::uint32_t>(ctr_), static_cast<std::uint32_t>(ctr_ >> 32), 0, 0}, key_);
      ++ctr_;
      have_ = 2;
    }
    std::size_t i = 2 - have_--;
    return (std::uint64_t{buf_[2 * i + 1]} << 32) | buf_[2 * i];
  }

 private:
  Key key_;
  std::uint64_t ctr_ = 0;
  Counter buf_{};
  unsigned have_ = 0;
};

/// Seed of trial i: mix64(mix64(master) + i).
constexpr std::uint64_t trial_seed(std::uint64_t master, std::uint64_t i) { return mix64(mix64(master) + i); }

}  // namespace runlab
