#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "runlab/errors.hpp"
#include "runlab/stream.hpp"
#include "runlab/words.hpp"

#include <cstdio>
#include <fstream>

using namespace runlab;

TEST_CASE("run length examples") {
  CHECK(run_length(Word::from_string("11010"), 5) == 2);
  CHECK(run_length(Word::repeat(false, 77)) == 0);
  CHECK(run_length(Word::repeat(true, 130)) == 130);
  CHECK_THROWS_AS(run_length(Word::from_string("101"), 4), OutOfRange);
}

TEST_CASE("run state update rule") {
  RunState s{3, 2, 2};
  CHECK(run_state_update(s, true) == RunState{4, 3, 3});
  CHECK(run_state_update(s, false) == RunState{4, 0, 2});
  RunState f;
  for (char c : std::string("11010")) f = run_state_update(f, c == '1');
  CHECK(f.max == 2);
}

TEST_CASE("every word of length up to 16 matches the brute-force definition") {
  for (unsigned len = 1; len <= 16; ++len) {
    for (std::uint64_t b = 0; b < (1ULL << len); ++b) {
      std::string s = oracle::word_of(b, len);
      Word w = Word::from_string(s);
      REQUIRE(run_length(w, len) == oracle::run_length(s, len));
    }
  }
}

TEST_CASE("streaming fold, batch and 64-bit paths agree on random prefixes") {
  std::mt19937_64 g(1);
  for (int it = 0; it < 300; ++it) {
    std::size_t len = 1 + g() % 2000;
    std::string s = oracle::random_word(g, len);
    // long runs make the word-at-a-time path interesting
    for (int r = 0; r < 3; ++r) {
      std::size_t at = g() % len, l = g() % 200;
      for (std::size_t j = at; j < std::min(len, at + l); ++j) s[j] = '1';
    }
    Word w = Word::from_string(s);
    RunState st;
    std::uint64_t prev = 0;
    for (std::size_t n = 1; n <= len; ++n) {
      st.push(w.digit(n));
      if (n % 37 == 0 || n == len) {
        std::uint64_t r = run_length(w, n);
        CHECK(r == st.max);
        CHECK(r == oracle::run_length_linear(s, n));
        CHECK(r >= prev);
        CHECK(r <= n);
        prev = r;
      }
    }
    RunState bulk;
    bulk.push_word(w, len);
    CHECK(bulk == st);
  }
}

TEST_CASE("word editing") {
  Word w = Word::from_string("101");
  w.append_run(true, 70);
  w.push_back(false);
  w.append_bits(0b1011, 4);
  CHECK(w.size() == 78);
  CHECK(w.to_string() == "101" + std::string(70, '1') + "0" + "1101");
  CHECK(w.truncate(3) == Word::from_string("101"));
  CHECK(w.truncate(40).is_prefix_of(w));
  CHECK_FALSE(Word::from_string("11").is_prefix_of(w));
  w.set(1, false);
  CHECK_FALSE(w.digit(1));
  CHECK(concat(Word::from_string("01"), Word::from_string("1")).to_string() == "011");
}

TEST_CASE("code map intervals") {
  CHECK(code_map_interval(Word::from_string("1")) == std::pair<Rational, Rational>(Rational(1, 2), 1));
  CHECK(code_map_interval(Word::from_string("01")) == std::pair<Rational, Rational>(Rational(1, 4), Rational(1, 2)));
  CHECK(code_map_interval(Word::from_string("110")) == std::pair<Rational, Rational>(Rational(3, 4), Rational(7, 8)));
  for (unsigned len = 0; len <= 12; ++len) {
    for (std::uint64_t b = 0; b < (1ULL << len); ++b) {
      Word w = Word::from_string(oracle::word_of(b, len));
      auto [lo, hi] = code_map_interval(w);
      CHECK(hi - lo == Rational(1, BigInt(1) << len));
      for (bool bit : {false, true}) {
        Word c = w;
        c.push_back(bit);
        auto [clo, chi] = code_map_interval(c);
        CHECK((lo <= clo && chi <= hi));
      }
    }
  }
}

TEST_CASE("metric exponent is symmetric and ultrametric") {
  auto stream = [](const std::string& s) { return make_explicit_stream(Word::from_string(s)); };
  CHECK(metric_distance_exponent(*stream("0110"), *stream("1110"), 100) == 0u);
  CHECK(metric_distance_exponent(*stream("1101"), *stream("1100"), 100) == 3u);
  CHECK_FALSE(metric_distance_exponent(*stream("1101"), *stream("1101"), 1000).has_value());
  std::mt19937_64 g(9);
  for (int it = 0; it < 3000; ++it) {
    unsigned len = 1 + g() % 12;
    auto a = stream(oracle::random_word(g, len)), b = stream(oracle::random_word(g, len)),
         c = stream(oracle::random_word(g, len));
    auto d = [](const Stream& x, const Stream& y) {
      auto e = metric_distance_exponent(*x, *y, 64);
      return e ? Rational(1, BigInt(1) << static_cast<unsigned>(*e)) : Rational(0);
    };
    CHECK(d(a, b) == d(b, a));
    CHECK(d(a, c) <= std::max(d(a, b), d(b, c)));
  }
}

TEST_CASE("bitstring parsing") {
  CHECK(parse_bitstring("1101 0\n01\n").to_string() == "1101001");
  try {
    parse_bitstring("11\n1x1");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 2);
  }
  std::mt19937_64 g(4);
  for (int it = 0; it < 50; ++it) {
    Word w = Word::from_string(oracle::random_word(g, g() % 300));
    CHECK(parse_packed(to_packed(w)) == w);
  }
  CHECK_THROWS_AS(parse_packed("abc"), ParseError);
}

TEST_CASE("bitstring files in both formats") {
  std::string ascii = "/tmp/runlab_words_ascii.txt", packed = "/tmp/runlab_words_packed.bin";
  Word w = Word::from_string("1101100111000010");
  std::ofstream(ascii) << "1101100111000010\n";
  std::ofstream(packed, std::ios::binary) << to_packed(w);
  CHECK(read_bitstring_file(ascii) == w);
  CHECK(read_bitstring_file(packed) == w);
  std::remove(ascii.c_str());
  std::remove(packed.c_str());
}
