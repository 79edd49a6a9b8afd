#pragma once

#include "runlab/numeric.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace runlab {

/// Default cap on materialized digits (10^8 bits).
inline constexpr std::uint64_t kDefaultMaterializeBudget = 100'000'000;

/// Finite binary word. Digits are 1-based in the public API (x_1, x_2, ...),
/// stored packed 64 per limb, digit i at bit (i-1) % 64 of limb (i-1) / 64.
class Word {
 public:
  Word() = default;
  explicit Word(std::size_t n, bool bit = false);

  /// Strict parse: only '0' and '1'.
  static Word from_string(std::string_view bits);
  static Word repeat(bool bit, std::size_t n);

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  /// Digit x_i, 1 <= i <= size().
  bool digit(std::size_t i) const;
  /// 0-based access, no bounds check.
  bool operator[](std::size_t i) const { return (limbs_[i >> 6] >> (i & 63)) & 1U; }

  void set(std::size_t i, bool b);  // 1-based
  void push_back(bool b);
  void append(const Word& w);
  void append_run(bool b, std::size_t n);
  /// Append the low `count` bits of `bits`, least significant first.
  void append_bits(std::uint64_t bits, unsigned count);

  /// w|_m, the first m digits.
  Word truncate(std::size_t m) const;
  bool is_prefix_of(const Word& other) const;

  const std::vector<std::uint64_t>& limbs() const { return limbs_; }
  std::string to_string() const;

  friend Word concat(const Word& a, const Word& b);
  friend bool operator==(const Word& a, const Word& b) {
    return a.size_ == b.size_ && a.limbs_ == b.limbs_;
  }

 private:
  std::vector<std::uint64_t> limbs_;
  std::size_t size_ = 0;
};

/// Streaming longest-run tracker.
struct RunState {
  std::uint64_t n = 0;
  std::uint64_t cur = 0;
  std::uint64_t max = 0;

  void push(bool b) {
    ++n;
    if (b) {
      ++cur;
      if (cur > max) max = cur;
    } else {
      cur = 0;
    }
  }
  /// Consume `count` <= 64 digits given LSB-first in `bits`.
  void push_bits(std::uint64_t bits, unsigned count);
  void push_word(const Word& w, std::size_t n);

  friend bool operator==(const RunState&, const RunState&) = default;
};

RunState run_state_update(RunState s, bool b);

/// r_n of a finite word, n <= w.size().
std::uint64_t run_length(const Word& w, std::size_t n);
inline std::uint64_t run_length(const Word& w) { return run_length(w, w.size()); }

/// [sum w_k 2^-k, sum w_k 2^-k + 2^-|w|].
std::pair<Rational, Rational> code_map_interval(const Word& w);

/// ASCII bitstring: '0'/'1', whitespace ignored. Errors carry line/column.
Word parse_bitstring(std::string_view text);
/// Packed format: 8-byte little-endian bit count, then bits MSB-first per byte.
Word parse_packed(std::string_view bytes);
std::string to_packed(const Word& w);
/// Reads either format; packed is detected by a non-ASCII or length-consistent header.
Word read_bitstring_file(const std::string& path);

}  // namespace runlab
