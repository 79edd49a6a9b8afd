#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>
#include <utility>

namespace runlab {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// Position of the highest set bit of n > 0.
std::size_t msb(const BigInt& n);

/// Exact rational from a decimal literal ("0.25", "3", "1/4", "-2.5e-3").
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& q);

/// Certified bounds lo <= log2(n) <= hi for n >= 1. Uses a 64-bit significand
/// with directed rounding; the width is at most 2^-frac_bits when n is not a
/// power of two and zero when it is.
std::pair<Rational, Rational> log2_bounds(const BigInt& n, unsigned frac_bits = 60);

/// Certified bounds on log2(q) for a positive rational.
std::pair<Rational, Rational> log2_bounds(const Rational& q, unsigned frac_bits = 60);

/// Certified bounds on ln(q) for a positive rational.
std::pair<Rational, Rational> ln_bounds(const Rational& q, unsigned frac_bits = 60);

/// Floor of the b-th root of n >= 0.
BigInt iroot_floor(const BigInt& n, unsigned long b);

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace runlab
