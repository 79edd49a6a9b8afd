#pragma once

#include "runlab/numeric.hpp"

#include <compare>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace runlab {

/// Exact integer that stays cheap at astronomically large magnitudes.
///
/// Values below 2^kDenseBits are stored as a GMP integer. Larger values are
/// stored in non-adjacent form: a sum of signed powers of two, sign_i *
/// 2^{exp_i}, with strictly decreasing exponents that differ by at least two.
/// Exponents are SparseInt themselves, so towers like 2^(2^(2^515)) are
/// representable. The representation is canonical, so structural equality is
/// value equality.
///
/// Supported arithmetic is closed on this representation: +, -, *, shifts by
/// powers of two, floor division by powers of two, floor(log2), residues
/// modulo small integers. General division is not.
class SparseInt {
 public:
  static constexpr std::size_t kDenseBits = 4096;
  /// Values whose bit length is below this print in decimal.
  static constexpr std::size_t kDecimalBits = 65536;

  SparseInt() = default;
  template <std::integral T>
  SparseInt(T v) : dense_(v) {}  // NOLINT(google-explicit-constructor)
  explicit SparseInt(const BigInt& v);

  /// 2^e for e >= 0.
  static SparseInt pow2(const SparseInt& e);

  /// Decimal, or expressions built from integers, + - *, parentheses and a^b
  /// (e.g. "2^(2^515)+5"). Inverse of to_string.
  static SparseInt parse(std::string_view text);

  int sign() const;
  bool is_zero() const { return sign() == 0; }
  bool is_dense() const { return terms_.empty(); }
  bool is_pow2() const;
  bool is_odd() const;

  std::optional<std::uint64_t> to_u64() const;
  /// Dense value when the bit length is at most max_bits.
  std::optional<BigInt> to_bigint(std::size_t max_bits = kDecimalBits) const;

  /// floor(log2(x)) for x > 0.
  SparseInt floor_log2() const;
  /// floor(x / 2^s) for s >= 0.
  SparseInt floor_div_pow2(const SparseInt& s) const;
  /// x * 2^s for s >= 0.
  SparseInt shl(const SparseInt& s) const;
  SparseInt half_floor() const { return floor_div_pow2(1); }
  /// Least non-negative residue modulo m, 1 <= m < 2^32.
  std::uint64_t mod(std::uint64_t m) const;
  SparseInt abs() const { return sign() < 0 ? -*this : *this; }

  /// Stable 64-bit hash of the value; equals mix64(v) whenever v fits in an
  /// int64.
  std::uint64_t hash() const;

  /// Decimal when the bit length is below decimal_bits, otherwise the
  /// canonical power-of-two expression.
  std::string to_string(std::size_t decimal_bits = kDecimalBits) const;

  SparseInt operator-() const;
  friend SparseInt operator+(const SparseInt& a, const SparseInt& b);
  friend SparseInt operator-(const SparseInt& a, const SparseInt& b);
  friend SparseInt operator*(const SparseInt& a, const SparseInt& b);
  SparseInt& operator+=(const SparseInt& o) { return *this = *this + o; }
  SparseInt& operator-=(const SparseInt& o) { return *this = *this - o; }
  SparseInt& operator*=(const SparseInt& o) { return *this = *this * o; }

  friend bool operator==(const SparseInt& a, const SparseInt& b);
  friend std::strong_ordering operator<=>(const SparseInt& a, const SparseInt& b);

  struct Term;
  /// Non-adjacent-form terms, highest exponent first (computed for dense values).
  std::vector<Term> terms() const;
  static SparseInt from_terms(std::vector<Term> terms);

 private:
  BigInt dense_;
  std::vector<Term> terms_;
};

struct SparseInt::Term {
  SparseInt exp;
  int sign = 1;
};

SparseInt min(const SparseInt& a, const SparseInt& b);
SparseInt max(const SparseInt& a, const SparseInt& b);

/// Non-negative rational with SparseInt parts, used for certified ratios at
/// indices far beyond dense range. Not reduced; comparisons cross-multiply.
struct SparseRational {
  SparseInt num;
  SparseInt den{1};

  SparseRational() = default;
  SparseRational(SparseInt n, SparseInt d = 1);  // NOLINT(google-explicit-constructor)
  static SparseRational from(const Rational& q);

  /// Exact value when both parts are dense.
  std::optional<Rational> to_rational() const;
  std::string to_string() const;

  friend SparseRational operator*(const SparseRational& a, const SparseRational& b);
  friend SparseRational operator/(const SparseRational& a, const SparseRational& b);
  friend std::strong_ordering operator<=>(const SparseRational& a, const SparseRational& b);
  friend bool operator==(const SparseRational& a, const SparseRational& b);
};

/// Closed interval [lo, hi] certified to contain a real value.
struct Interval {
  SparseRational lo;
  SparseRational hi;
  bool exact() const { return lo == hi; }
};

using Index = SparseInt;

}  // namespace runlab
