#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "runlab/errors.hpp"
#include "runlab/sparse_int.hpp"

#include <random>

using namespace runlab;

namespace {

BigInt random_big(std::mt19937_64& g, unsigned bits) {
  BigInt v = 0;
  for (unsigned i = 0; i < bits; i += 64) v = (v << 64) + BigInt(g());
  v >>= static_cast<unsigned>((bits + 63) / 64 * 64 - bits);
  return (g() & 1) ? BigInt(-v) : v;
}

BigInt to_big(const SparseInt& s) { return *s.to_bigint(1 << 16); }

}  // namespace

TEST_CASE("arithmetic agrees with GMP across the dense/sparse boundary") {
  std::mt19937_64 g(7);
  for (int it = 0; it < 300; ++it) {
    unsigned ba = 1 + g() % 6000, bb = 1 + g() % 6000;
    BigInt a = random_big(g, ba), b = random_big(g, bb);
    SparseInt sa(a), sb(b);
    CHECK(to_big(sa) == a);
    CHECK(to_big(sa + sb) == a + b);
    CHECK(to_big(sa - sb) == a - b);
    CHECK(((sa < sb) == (a < b)));
    CHECK(((sa == sb) == (a == b)));
    CHECK(sa - sa == SparseInt(0));
  }
}

TEST_CASE("products of sparse values") {
  std::mt19937_64 g(11);
  for (int it = 0; it < 60; ++it) {
    BigInt a = random_big(g, 1 + g() % 300);
    BigInt b = BigInt(1) << static_cast<unsigned>(3000 + g() % 3000);
    b += random_big(g, 1 + g() % 200);
    CHECK(to_big(SparseInt(a) * SparseInt(b)) == a * b);
  }
}

TEST_CASE("shifts, floor_log2 and floor division") {
  std::mt19937_64 g(3);
  for (int it = 0; it < 200; ++it) {
    BigInt a = boost::multiprecision::abs(random_big(g, 1 + g() % 7000)) + 1;
    unsigned s = g() % 5000;
    SparseInt sa(a);
    CHECK(sa.floor_log2() == SparseInt(static_cast<std::uint64_t>(msb(a))));
    CHECK(to_big(sa.shl(s)) == (a << s));
    CHECK(to_big(sa.floor_div_pow2(s)) == (a >> s));
    CHECK(sa.is_odd() == bool(a & 1));
  }
  CHECK(SparseInt(-7).floor_div_pow2(1) == SparseInt(-4));
  CHECK_THROWS_AS(SparseInt(0).floor_log2(), InvalidParameter);
}

TEST_CASE("residues of huge values") {
  std::mt19937_64 g(5);
  for (int it = 0; it < 100; ++it) {
    BigInt a = boost::multiprecision::abs(random_big(g, 1 + g() % 6000));
    std::uint64_t m = 1 + g() % 100000;
    CHECK(SparseInt(a).mod(m) == static_cast<std::uint64_t>(a % m));
  }
  // 2^(2^100) mod 7: 2^100 = 4 mod 6 gives 2^4 = 2 mod 7
  SparseInt t = SparseInt::pow2(SparseInt::pow2(100));
  CHECK(t.mod(7) == 2);
  CHECK((t + 5).mod(7) == 0);
  CHECK(t.mod(1) == 0);
}

TEST_CASE("towers compare and shift symbolically") {
  SparseInt a = SparseInt::parse("2^(2^517)");
  SparseInt b = SparseInt::parse("2^(2^517+1)+5");
  CHECK(a < b);
  CHECK(a * 2 + 5 == b);
  CHECK(b.floor_log2() == SparseInt::parse("2^517+1"));
  CHECK(b.floor_div_pow2(SparseInt::parse("2^517")) == SparseInt(2));
  CHECK(a.is_pow2());
  CHECK_FALSE(b.is_pow2());
  CHECK(b - a - a == SparseInt(5));
  CHECK_FALSE(a.to_bigint().has_value());
}

TEST_CASE("parse and to_string round trip") {
  for (const char* s : {"0", "17", "-3", "2^(2^517+1)+5", "2^(2^268+10)", "2^(2^(2^256))"}) {
    SparseInt v = SparseInt::parse(s);
    CHECK(SparseInt::parse(v.to_string()) == v);
  }
  CHECK(SparseInt::parse("2^10 - 24") == SparseInt(1000));
  CHECK(SparseInt::parse("3*(2+5)^2") == SparseInt(147));
  CHECK(SparseInt::parse("2^3^2") == SparseInt(512));
  CHECK(SparseInt::parse("2^(2^517+1)+5").to_string() == "2^(2^517+1)+5");
  CHECK_THROWS_AS(SparseInt::parse("2^^3"), ParseError);
  CHECK_THROWS_AS(SparseInt::parse(""), ParseError);
}

TEST_CASE("hash depends only on the value") {
  SparseInt a = SparseInt::parse("2^5000+1");
  SparseInt b = SparseInt::pow2(5000) + 1;
  CHECK(a.hash() == b.hash());
  CHECK(SparseInt(12345).hash() == mix64(12345));
  CHECK(SparseInt(12345).hash() != SparseInt(12346).hash());
}

TEST_CASE("sparse rationals") {
  SparseRational q(SparseInt(6), SparseInt(-4));
  CHECK(*q.to_rational() == Rational(-3, 2));
  SparseRational big(SparseInt::pow2(SparseInt::pow2(100)), 3);
  CHECK(big > SparseRational(SparseInt(1000000)));
  CHECK(SparseRational(1, 3) < SparseRational(1, 2));
  CHECK(SparseRational(1, 3) * SparseRational(3, 1) == SparseRational(1));
  CHECK_THROWS_AS(SparseRational(1, 0), InvalidParameter);
}
