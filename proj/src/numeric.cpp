#include "runlab/numeric.hpp"

#include "runlab/errors.hpp"

#include <cctype>

namespace runlab {

namespace {

using u128 = unsigned __int128;

constexpr u128 kOne64 = static_cast<u128>(1) << 64;

// ln 2 to 25 decimal places, rounded down and up.
const Rational& ln2_lo() {
  static const Rational v(BigInt("6931471805599453094172321"), BigInt("10000000000000000000000000"));
  return v;
}
const Rational& ln2_hi() {
  static const Rational v(BigInt("6931471805599453094172322"), BigInt("10000000000000000000000000"));
  return v;
}

Rational parse_decimal(const std::string& s) {
  if (s.empty()) throw ParseError("empty number");
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') {
    neg = s[i] == '-';
    ++i;
  }
  BigInt mantissa = 0;
  long scale = 0;
  bool digits = false;
  bool dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      if (dot) --scale;
      digits = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else if (c == 'e' || c == 'E') {
      break;
    } else {
      throw ParseError("invalid number '" + s + "'");
    }
  }
  if (!digits) throw ParseError("invalid number '" + s + "'");
  if (i < s.size()) {
    std::string exp = s.substr(i + 1);
    if (exp.empty()) throw ParseError("invalid exponent in '" + s + "'");
    std::size_t used = 0;
    long e = 0;
    try {
      e = std::stol(exp, &used);
    } catch (const std::exception&) {
      throw ParseError("invalid exponent in '" + s + "'");
    }
    if (used != exp.size() || e > 100000 || e < -100000) {
      throw ParseError("invalid exponent in '" + s + "'");
    }
    scale += e;
  }
  Rational q(mantissa);
  BigInt p10 = pow(BigInt(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
  if (scale < 0) {
    q /= Rational(p10);
  } else {
    q *= Rational(p10);
  }
  return neg ? Rational(-q) : q;
}

}  // namespace

std::size_t msb(const BigInt& n) { return boost::multiprecision::msb(n); }

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) return parse_decimal(text);
  Rational num = parse_decimal(text.substr(0, slash));
  Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw ParseError("zero denominator in '" + text + "'");
  return num / den;
}

std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

std::pair<Rational, Rational> log2_bounds(const BigInt& n, unsigned frac_bits) {
  if (n < 1) throw InvalidParameter("log2 of a non-positive integer");
  if (frac_bits > 62) frac_bits = 62;
  const std::size_t e = msb(n);
  if (boost::multiprecision::lsb(n) == e) return {Rational(BigInt(e)), Rational(BigInt(e))};

  // Significand m = n / 2^e in [1, 2) as a fixed-point value with 63 fraction
  // bits; lo rounds down and hi rounds up.
  std::uint64_t top;
  bool inexact = false;
  if (e >= 63) {
    BigInt shifted = n >> (e - 63);
    top = shifted.convert_to<std::uint64_t>();
    inexact = (shifted << (e - 63)) != n;
  } else {
    top = n.convert_to<std::uint64_t>() << (63 - e);
  }
  u128 lo = top;
  u128 hi = static_cast<u128>(top) + (inexact ? 1 : 0);

  std::uint64_t flo = 0;
  std::uint64_t fhi = 0;
  unsigned hi_bits = frac_bits;
  for (unsigned i = 0; i < frac_bits; ++i) {
    u128 sq = lo * lo;
    flo <<= 1;
    if (sq >> 127) {
      flo |= 1;
      lo = sq >> 64;
    } else {
      lo = sq >> 63;
    }
    if (hi_bits == frac_bits) {
      if (hi >= kOne64) {
        hi_bits = i;  // residual upper bound reached 2: remaining fraction < 1
        continue;
      }
      u128 sqh = hi * hi;
      fhi <<= 1;
      if (sqh >> 127) {
        fhi |= 1;
        hi = (sqh >> 64) + ((sqh & (kOne64 - 1)) ? 1 : 0);
      } else {
        hi = (sqh >> 63) + ((sqh & ((static_cast<u128>(1) << 63) - 1)) ? 1 : 0);
      }
    }
  }
  Rational base{BigInt(e)};
  Rational lo_q = base + Rational(BigInt(flo), BigInt(1) << frac_bits);
  Rational hi_q = base + Rational(BigInt(fhi) + 1, BigInt(1) << hi_bits);
  return {lo_q, hi_q};
}

std::pair<Rational, Rational> log2_bounds(const Rational& q, unsigned frac_bits) {
  if (q <= 0) throw InvalidParameter("log2 of a non-positive rational");
  auto [nlo, nhi] = log2_bounds(BigInt(numerator(q)), frac_bits);
  auto [dlo, dhi] = log2_bounds(BigInt(denominator(q)), frac_bits);
  return {nlo - dhi, nhi - dlo};
}

std::pair<Rational, Rational> ln_bounds(const Rational& q, unsigned frac_bits) {
  auto [a, b] = log2_bounds(q, frac_bits);
  Rational lo = a >= 0 ? Rational(a * ln2_lo()) : Rational(a * ln2_hi());
  Rational hi = b >= 0 ? Rational(b * ln2_hi()) : Rational(b * ln2_lo());
  return {lo, hi};
}

BigInt iroot_floor(const BigInt& n, unsigned long b) {
  if (n < 0) throw InvalidParameter("root of a negative integer");
  if (b == 0) throw InvalidParameter("zeroth root");
  BigInt r;
  mpz_root(r.backend().data(), n.backend().data(), b);
  return r;
}

}  // namespace runlab
